//! Ready-made catalogs used by the examples, tests and CLI demos.

use crate::model::*;

struct SpSpec<'a> {
    id: &'a str,
    inputs: &'a [&'a str],
    outputs: &'a [&'a str],
    perf: Option<PerformanceModel>,
}

fn software_package(s: &SpSpec<'_>) -> SoftwarePackage {
    SoftwarePackage {
        id: s.id.into(),
        inputs: s
            .inputs
            .iter()
            .map(|v| InputParamSp {
                varname: (*v).into(),
                value: None,
            })
            .collect(),
        outputs: s
            .outputs
            .iter()
            .map(|v| OutputParamSp { varname: (*v).into() })
            .collect(),
        perf: s.perf,
    }
}

/// `inputs`: (varname, default, uri); `outputs`: (varname, uri).
fn implementing_package(
    id: &str,
    sp: &str,
    inputs: &[(&str, Option<&str>, &str)],
    outputs: &[(&str, &str)],
) -> ImplementingPackage {
    ImplementingPackage {
        id: id.into(),
        sp: sp.into(),
        inputs: inputs
            .iter()
            .map(|(v, d, u)| InputParamIp {
                base: (*v).into(),
                default_value: d.map(str::to_owned),
                uri: SemanticUri::new(*u),
            })
            .collect(),
        outputs: outputs
            .iter()
            .map(|(v, u)| OutputParamIp {
                base: (*v).into(),
                uri: SemanticUri::new(*u),
            })
            .collect(),
    }
}

fn method(id: &str, seq: &[&str]) -> Method {
    Method {
        id: id.into(),
        ip_sequence: seq.iter().map(|s| (*s).into()).collect(),
    }
}

fn model(id: &str, methods: &[&str], selected: &str) -> SimulationModel {
    SimulationModel {
        id: id.into(),
        methods: methods.iter().map(|s| (*s).into()).collect(),
        selected_method: Some(selected.into()),
    }
}

/// Sea waves (`o1`) driving a ship (`o2`), laid out on the four-level
/// hierarchy with 15 implementing packages, 8 methods and 4 models:
///
/// ```text
/// o1: m1 {s1, s2}  m2 {s3}  m3 {s4, s5}      o2: m4 {s6, s7, s8}
/// s1 = ip1 ip2 ip3   s2 = ip4 ip5   s3 = ip6 ip7   s4 = ip8 ip9   s5 = ip10
/// s6 = ip11 ip12     s7 = ip14 ip15 s8 = ip13
/// ```
///
/// Defaults select s2, s3, s5 and s7, so the wave forcing of `ip10` is the
/// only output matching an open input of the ship (`ip14.forcing`).
pub fn ship_and_waves() -> Catalog {
    const WIND_FILE: &str = "urn:vso:wind-data-file";
    const WIND: &str = "urn:vso:wind-field";
    const RAW: &str = "urn:vso:raw-wave-spectrum";
    const SPECTRUM: &str = "urn:vso:wave-spectrum";
    const SPECTRUM_FILE: &str = "urn:vso:wave-spectrum-file";
    const STATIONS: &str = "urn:vso:station-list";
    const OBS: &str = "urn:vso:station-observations";
    const GRID: &str = "urn:vso:gridded-wind";
    const FORCING: &str = "urn:vso:wave-forcing";
    const WAVE_LOAD: &str = "urn:ext:wave-load";
    const HULL: &str = "urn:vso:hull-geometry";
    const MOTION: &str = "urn:vso:ship-motion";
    const PLOT: &str = "urn:vso:motion-plot";

    let sp = |id, inputs, outputs, perf| {
        software_package(&SpSpec {
            id,
            inputs,
            outputs,
            perf,
        })
    };
    let fixed = |s| Some(PerformanceModel::fixed(s));

    Catalog {
        software_packages: vec![
            sp("wind_reader", &["source"], &["wind"], fixed(2.0)),
            sp("ww3", &["wind"], &["raw_spectrum"], fixed(45.0)),
            sp("spectrum_filter", &["raw_spectrum"], &["spectrum"], None),
            sp("swan", &["wind"], &["spectrum"], fixed(30.0)),
            sp("station_reader", &["stations"], &["observations"], fixed(1.0)),
            sp("interpolator", &["observations"], &["grid"], fixed(5.0)),
            sp("spectrum_reader", &["path"], &["spectrum"], fixed(2.0)),
            sp(
                "forcing_calc",
                &["spectrum"],
                &["forcing"],
                Some(PerformanceModel {
                    fixed_cost: 8.0,
                    per_unit_cost: 0.5,
                }),
            ),
            sp("strip_theory", &["forcing"], &["motion"], fixed(20.0)),
            sp("ship_dynamics", &["forcing", "hull"], &["motion"], fixed(60.0)),
            sp("motion_viz", &["motion"], &["plot"], fixed(4.0)),
        ],
        implementing_packages: vec![
            implementing_package(
                "ip1",
                "wind_reader",
                &[("source", Some("gfs.grib"), WIND_FILE)],
                &[("wind", WIND)],
            ),
            implementing_package("ip2", "ww3", &[("wind", None, WIND)], &[("raw_spectrum", RAW)]),
            implementing_package(
                "ip3",
                "spectrum_filter",
                &[("raw_spectrum", None, RAW)],
                &[("spectrum", SPECTRUM)],
            ),
            implementing_package(
                "ip4",
                "wind_reader",
                &[("source", Some("era5.grib"), WIND_FILE)],
                &[("wind", WIND)],
            ),
            implementing_package("ip5", "swan", &[("wind", None, WIND)], &[("spectrum", SPECTRUM)]),
            implementing_package(
                "ip6",
                "station_reader",
                &[("stations", Some("stations.csv"), STATIONS)],
                &[("observations", OBS)],
            ),
            implementing_package(
                "ip7",
                "interpolator",
                &[("observations", None, OBS)],
                &[("grid", GRID)],
            ),
            implementing_package(
                "ip8",
                "spectrum_reader",
                &[("path", Some("archive/spectrum.nc"), SPECTRUM_FILE)],
                &[("spectrum", SPECTRUM)],
            ),
            implementing_package(
                "ip9",
                "forcing_calc",
                &[("spectrum", None, SPECTRUM)],
                &[("forcing", FORCING)],
            ),
            implementing_package(
                "ip10",
                "forcing_calc",
                &[("spectrum", Some("archive/spectrum.nc"), SPECTRUM)],
                &[("forcing", FORCING)],
            ),
            implementing_package(
                "ip11",
                "strip_theory",
                &[("forcing", Some("archive/forcing.nc"), FORCING)],
                &[("motion", MOTION)],
            ),
            implementing_package(
                "ip12",
                "motion_viz",
                &[("motion", None, MOTION)],
                &[("plot", PLOT)],
            ),
            implementing_package(
                "ip13",
                "ship_dynamics",
                &[
                    ("forcing", Some("archive/forcing.nc"), WAVE_LOAD),
                    ("hull", Some("kvlcc2.hull"), HULL),
                ],
                &[("motion", MOTION)],
            ),
            implementing_package(
                "ip14",
                "ship_dynamics",
                &[("forcing", None, FORCING), ("hull", Some("kvlcc2.hull"), HULL)],
                &[("motion", MOTION)],
            ),
            implementing_package(
                "ip15",
                "motion_viz",
                &[("motion", None, MOTION)],
                &[("plot", PLOT)],
            ),
        ],
        methods: vec![
            method("s1", &["ip1", "ip2", "ip3"]),
            method("s2", &["ip4", "ip5"]),
            method("s3", &["ip6", "ip7"]),
            method("s4", &["ip8", "ip9"]),
            method("s5", &["ip10"]),
            method("s6", &["ip11", "ip12"]),
            method("s7", &["ip14", "ip15"]),
            method("s8", &["ip13"]),
        ],
        models: vec![
            model("m1", &["s1", "s2"], "s2"),
            model("m2", &["s3"], "s3"),
            model("m3", &["s4", "s5"], "s5"),
            model("m4", &["s6", "s7", "s8"], "s7"),
        ],
        images: vec![
            VsoImage {
                id: "o1".into(),
                properties: vec![Property {
                    name: "region".into(),
                    uri: SemanticUri::new("urn:vso:sea-region"),
                    value: Some("baltic".into()),
                }],
                models: vec!["m1".into(), "m2".into(), "m3".into()],
                children: vec![],
            },
            VsoImage {
                id: "o2".into(),
                properties: vec![Property {
                    name: "displacement".into(),
                    uri: SemanticUri::new("urn:vso:displacement"),
                    value: None,
                }],
                models: vec!["m4".into()],
                children: vec![],
            },
        ],
        same_as: vec![SameAs(SemanticUri::new(WAVE_LOAD), SemanticUri::new(FORCING))],
    }
}

/// One image `pipeline` with a single model whose only method runs `n`
/// packages `p0..p{n-1}` in a chain. Package `i` reads `urn:pipe:i` and
/// writes `urn:pipe:{i+1}`; every input is unset and every package costs 1s.
pub fn linear_pipeline(n: usize) -> Catalog {
    let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    Catalog {
        software_packages: vec![software_package(&SpSpec {
            id: "stage",
            inputs: &["x"],
            outputs: &["y"],
            perf: Some(PerformanceModel::fixed(1.0)),
        })],
        implementing_packages: (0..n)
            .map(|i| {
                implementing_package(
                    &ids[i],
                    "stage",
                    &[("x", None, &format!("urn:pipe:{i}"))],
                    &[("y", &format!("urn:pipe:{}", i + 1))],
                )
            })
            .collect(),
        methods: vec![Method {
            id: "run".into(),
            ip_sequence: ids.clone(),
        }],
        models: vec![model("chain", &["run"], "run")],
        images: vec![VsoImage {
            id: "pipeline".into(),
            properties: vec![],
            models: vec!["chain".into()],
            children: vec![],
        }],
        same_as: vec![],
    }
}

/// A block-structured vocabulary for [`ship_and_waves`] with named
/// arguments and a header/footer.
pub fn ship_vocabulary() -> crate::codegen::DslVocabulary {
    let templates = [
        (
            "forcing_calc",
            "{step} := forcing_calc(spectrum: {in:spectrum}) -> {out:forcing}",
        ),
        (
            "interpolator",
            "{step} := interpolator(observations: {in:observations}) -> {out:grid}",
        ),
        (
            "motion_viz",
            "{step} := motion_viz(motion: {in:motion}) -> {out:plot}",
        ),
        (
            "ship_dynamics",
            "{step} := ship_dynamics(forcing: {in:forcing}, hull: {in:hull}) -> {out:motion}",
        ),
        (
            "spectrum_filter",
            "{step} := spectrum_filter(raw_spectrum: {in:raw_spectrum}) -> {out:spectrum}",
        ),
        (
            "spectrum_reader",
            "{step} := spectrum_reader(path: \"{in:path}\") -> {out:spectrum}",
        ),
        (
            "station_reader",
            "{step} := station_reader(stations: \"{in:stations}\") -> {out:observations}",
        ),
        (
            "strip_theory",
            "{step} := strip_theory(forcing: {in:forcing}) -> {out:motion}",
        ),
        ("swan", "{step} := swan(wind: {in:wind}) -> {out:spectrum}"),
        (
            "wind_reader",
            "{step} := wind_reader(source: \"{in:source}\") -> {out:wind}",
        ),
        ("ww3", "{step} := ww3(wind: {in:wind}) -> {out:raw_spectrum}"),
    ];
    crate::codegen::DslVocabulary {
        name: "blocks".into(),
        header: Some("workflow {".into()),
        footer: Some("}".into()),
        ref_syntax: "{step}[{var}]".into(),
        statement_templates: templates
            .iter()
            .map(|(k, v)| ((*k).to_owned(), format!("  {v}")))
            .collect(),
    }
}
