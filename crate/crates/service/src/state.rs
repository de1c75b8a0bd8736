use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use vso_core::{DslVocabulary, Environment, KnowledgeBase};

use crate::error::ApiError;

/// One client's environment. `revision` starts at 1 and grows by one per
/// committed mutation.
#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub revision: u64,
    pub environment: Environment,
}

/// Shared service state: the catalog, the named vocabularies and the open
/// sessions. Each session sits behind its own lock, so mutations of one
/// session are serialized while different sessions proceed independently.
#[derive(Debug)]
pub struct AppState {
    kb: Arc<KnowledgeBase>,
    vocabularies: BTreeMap<String, DslVocabulary>,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<Session>>>>,
    next_session: AtomicU64,
}

impl AppState {
    /// The `generic` vocabulary is always available.
    pub fn new(kb: KnowledgeBase) -> Self {
        let generic = DslVocabulary::generic(kb.catalog());
        AppState {
            kb: Arc::new(kb),
            vocabularies: BTreeMap::from([(generic.name.clone(), generic)]),
            sessions: RwLock::new(BTreeMap::new()),
            next_session: AtomicU64::new(1),
        }
    }

    /// Registers `vocab` under its own name, replacing any earlier one.
    pub fn with_vocabulary(mut self, vocab: DslVocabulary) -> Self {
        self.vocabularies.insert(vocab.name.clone(), vocab);
        self
    }

    pub fn knowledge(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn vocabulary(&self, name: &str) -> Result<&DslVocabulary, ApiError> {
        self.vocabularies
            .get(name)
            .ok_or_else(|| ApiError::new("UnknownVocabulary", format!("unknown vocabulary `{name}`")))
    }

    pub fn vocabulary_names(&self) -> Vec<String> {
        self.vocabularies.keys().cloned().collect()
    }

    pub fn open_session(&self, environment: Environment) -> Session {
        let n = self.next_session.fetch_add(1, Ordering::Relaxed);
        let session = Session {
            id: format!("session-{n}"),
            revision: 1,
            environment,
        };
        self.sessions
            .write()
            .expect("session table poisoned")
            .insert(session.id.clone(), Arc::new(Mutex::new(session.clone())));
        session
    }

    pub fn close_session(&self, id: &str) -> Result<(), ApiError> {
        self.sessions
            .write()
            .expect("session table poisoned")
            .remove(id)
            .map(|_| ())
            .ok_or_else(|| ApiError::unknown_session(id))
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .read()
            .expect("session table poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::unknown_session(id))
    }

    /// Runs `f` against the committed state of a session.
    pub fn read<T>(
        &self,
        id: &str,
        f: impl FnOnce(&Session, &KnowledgeBase) -> Result<T, ApiError>,
    ) -> Result<T, ApiError> {
        let session = self.session(id)?;
        let guard = session.lock().expect("session poisoned");
        f(&guard, &self.kb)
    }

    /// Applies `f` to a copy of the environment and commits it only if `f`
    /// succeeds and `revision` is still current. Returns the new revision.
    pub fn mutate<T>(
        &self,
        id: &str,
        revision: u64,
        f: impl FnOnce(&mut Environment, &KnowledgeBase) -> Result<T, ApiError>,
    ) -> Result<(u64, T), ApiError> {
        let session = self.session(id)?;
        let mut guard = session.lock().expect("session poisoned");
        if guard.revision != revision {
            return Err(ApiError::stale_revision(revision, guard.revision));
        }
        let mut env = guard.environment.clone();
        let out = f(&mut env, &self.kb)?;
        guard.environment = env;
        guard.revision += 1;
        Ok((guard.revision, out))
    }
}
