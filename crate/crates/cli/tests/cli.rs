mod common;

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use common::*;
use hudsal::compositor::{composite, glyph_hud, CompositeSpec};
use hudsal::{GrayMap, Region, RgbImage, SaliencyBackend};
use hudsal_cli::{commands, manifest};
use serde_json::Value;

const REGION: Region = Region {
    x: 32,
    y: 16,
    w: 256,
    h: 256,
};

/// Writes a measured image (street + green glyph) and its HUD image.
fn fixtures(dir: &Path) -> (String, String) {
    let hud = glyph_hud(&glyph_mask(16), GREEN);
    let bg = street_scene(320, 288, REGION, 0.3);
    let measured = composite(&CompositeSpec::new(bg, hud.clone(), REGION)).unwrap();
    let (m, h) = (dir.join("measured.png"), dir.join("hud.png"));
    write_png(&m, &measured);
    write_png(&h, &hud);
    (
        m.to_str().unwrap().to_string(),
        h.to_str().unwrap().to_string(),
    )
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn evaluate_writes_json_report_and_maps() {
    let dir = tempfile::tempdir().unwrap();
    let (m, h) = fixtures(dir.path());
    let out = dir.path().join("out");
    let res = hudsal(&[
        "evaluate",
        "--measured",
        &m,
        "--hud",
        &h,
        "--region",
        "32,16,256,256",
        "--out",
        s(&out),
        "--dump-maps",
    ]);
    assert!(res.status.success(), "{}", stderr(&res));

    let report = read_json(&out.join("report.json"));
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["backend"], "itti");
    let case = &report["cases"][0];
    for key in ["p", "m"] {
        let v = case[key].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&v), "{key} = {v}");
        let display = case[format!("{key}_display")].as_str().unwrap();
        assert_eq!(display, format!("{v:.3}"));
    }
    assert_eq!(
        case["region"],
        serde_json::json!({"x": 32, "y": 16, "w": 256, "h": 256})
    );
    assert_eq!(case["params_fingerprint"], report["params_fingerprint"]);
    assert_eq!(case["maps"]["e_minus"], "e_minus.png");

    for (name, dims) in [
        ("m_s.png", (320, 288)),
        ("m_s_hud.png", (256, 256)),
        ("h_s.png", (256, 256)),
        ("e_plus.png", (256, 256)),
        ("e_minus.png", (256, 256)),
    ] {
        let img = hudsal::load_png(out.join(name)).unwrap();
        assert_eq!((img.width(), img.height()), dims, "{name}");
    }
}

#[test]
fn evaluate_csv_has_exact_header() {
    let dir = tempfile::tempdir().unwrap();
    let (m, h) = fixtures(dir.path());
    let out = dir.path().join("out");
    let res = hudsal(&[
        "evaluate",
        "--measured",
        &m,
        "--hud",
        &h,
        "--region",
        "32,16,256,256",
        "--out",
        s(&out),
        "--format",
        "csv",
        "--id",
        "c1",
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    let text = std::fs::read_to_string(out.join("report.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("id,p,m,region,content_group"));
    let row = lines.next().unwrap();
    assert!(
        row.starts_with("c1,") && row.ends_with(",\"32,16,256,256\",default"),
        "{row}"
    );
    assert!(!out.join("report.json").exists());
}

#[test]
fn evaluate_validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let (m, h) = fixtures(dir.path());
    let out = dir.path().join("out");
    let cases: [(&[&str], &str); 4] = [
        (
            &["--measured", &m, "--hud", &h, "--region", "10,10,0,5"],
            "zero width",
        ),
        (
            &["--measured", &m, "--hud", &h, "--region", "100,100,256,256"],
            "--region",
        ),
        (
            &[
                "--measured",
                "nope.png",
                "--hud",
                &h,
                "--region",
                "0,0,256,256",
            ],
            "--measured",
        ),
        (
            &[
                "--measured",
                &h,
                "--hud",
                &h,
                "--region",
                "0,0,8,8",
                "--id",
                "a/b",
            ],
            "--id",
        ),
    ];
    for (args, needle) in cases {
        let mut full = vec!["evaluate", "--out", s(&out)];
        full.extend_from_slice(args);
        let res = hudsal(&full);
        assert_eq!(res.status.code(), Some(2), "{args:?}: {}", stderr(&res));
        assert!(stderr(&res).contains(needle), "{args:?}: {}", stderr(&res));
    }
    assert!(!out.exists());
}

#[test]
fn small_input_is_rejected_before_work() {
    let dir = tempfile::tempdir().unwrap();
    let small = dir.path().join("small.png");
    write_png(&small, &RgbImage::filled(64, 64, RED).unwrap());
    let res = hudsal(&[
        "evaluate",
        "--measured",
        s(&small),
        "--hud",
        s(&small),
        "--region",
        "0,0,64,64",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(
        stderr(&res).contains("minimum input size is 256x256"),
        "{}",
        stderr(&res)
    );
}

#[test]
fn corrupt_png_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let (_, h) = fixtures(dir.path());
    let bad = dir.path().join("bad.png");
    std::fs::write(&bad, b"\x89PNG\r\n\x1a\nnot really").unwrap();
    let res = hudsal(&[
        "evaluate",
        "--measured",
        s(&bad),
        "--hud",
        &h,
        "--region",
        "0,0,8,8",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(res.status.code(), Some(1), "{}", stderr(&res));
}

#[test]
fn invalid_params_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let (m, h) = fixtures(dir.path());
    let params = dir.path().join("params.json");
    std::fs::write(&params, r#"{"output_scale": 7}"#).unwrap();
    let res = hudsal(&[
        "evaluate",
        "--measured",
        &m,
        "--hud",
        &h,
        "--region",
        "32,16,256,256",
        "--out",
        s(dir.path()),
        "--params",
        s(&params),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("--params"), "{}", stderr(&res));
}

#[test]
fn params_override_changes_fingerprint() {
    let dir = tempfile::tempdir().unwrap();
    let (m, h) = fixtures(dir.path());
    let params = dir.path().join("params.json");
    std::fs::write(&params, r#"{"orientations": [0, 90]}"#).unwrap();
    let run = |out: &Path, extra: &[&str]| {
        let mut args = vec![
            "evaluate",
            "--measured",
            &m,
            "--hud",
            &h,
            "--region",
            "32,16,256,256",
            "--out",
            s(out),
        ];
        args.extend_from_slice(extra);
        assert!(hudsal(&args).status.success());
        read_json(&out.join("report.json"))
    };
    let a = run(&dir.path().join("a"), &[]);
    let b = run(&dir.path().join("b"), &["--params", s(&params)]);
    assert_ne!(a["params_fingerprint"], b["params_fingerprint"]);
    assert_eq!(b["params"]["orientations"], serde_json::json!([0.0, 90.0]));
}

fn write_batch(dir: &Path, ids: &[&str]) -> std::path::PathBuf {
    let (m, h) = fixtures(dir);
    let cases: Vec<Value> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            serde_json::json!({
                "id": id,
                "measured": Path::new(&m).file_name().unwrap().to_str(),
                "hud": Path::new(&h).file_name().unwrap().to_str(),
                "region": {"x": 32, "y": 16, "w": 256, "h": 256},
                "content_group": if i % 2 == 0 { "a" } else { "b" },
            })
        })
        .collect();
    let path = dir.join("manifest.json");
    let manifest = serde_json::json!({"schema_version": 1, "output_dir": "results", "dump_maps": false, "cases": cases});
    std::fs::write(&path, manifest.to_string()).unwrap();
    path
}

#[test]
fn batch_reports_every_case_in_manifest_order() {
    let dir = tempfile::tempdir().unwrap();
    let ids = ["h", "g", "f", "e", "d", "c", "b", "a"];
    let manifest = write_batch(dir.path(), &ids);
    let res = hudsal(&["--jobs", "3", "batch", s(&manifest)]);
    assert!(res.status.success(), "{}", stderr(&res));

    let out = dir.path().join("results");
    let report = read_json(&out.join("report.json"));
    let got: Vec<&str> = report["cases"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(got, ids);
    let rankings = report["rankings"].as_array().unwrap();
    assert_eq!(rankings.len(), 2);
    for r in rankings {
        assert_eq!(r["entries"].as_array().unwrap().len(), 4);
        let ms: Vec<f64> = r["entries"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["m"].as_f64().unwrap())
            .collect();
        assert!(ms.windows(2).all(|w| w[0] >= w[1]));
    }
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    assert!(out.join("rankings.csv").is_file());
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(
        stdout.contains("content_group a") && stdout.contains("content_group b"),
        "{stdout}"
    );
}

#[test]
fn batch_duplicate_id_exits_2_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_batch(dir.path(), &["one", "twin", "twin"]);
    let res = hudsal(&["batch", s(&manifest)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("\"twin\""), "{}", stderr(&res));
    assert!(!dir.path().join("results").exists());
}

#[test]
fn batch_missing_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_batch(dir.path(), &["a", "b"]);
    let text = std::fs::read_to_string(&manifest)
        .unwrap()
        .replacen("measured.png", "gone.png", 1);
    std::fs::write(&manifest, text).unwrap();
    let res = hudsal(&["batch", s(&manifest)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("gone.png"));
}

#[test]
fn batch_empty_manifest_warns_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_batch(dir.path(), &[]);
    let res = hudsal(&["batch", s(&manifest)]);
    assert!(res.status.success());
    assert!(stderr(&res).contains("warning"), "{}", stderr(&res));
    let report = read_json(&dir.path().join("results").join("report.json"));
    assert_eq!(report["cases"], serde_json::json!([]));
    let csv = std::fs::read_to_string(dir.path().join("results").join("report.csv")).unwrap();
    assert_eq!(csv, "id,p,m,region,content_group\n");
}

struct Counting {
    calls: AtomicUsize,
}

impl SaliencyBackend for Counting {
    fn compute(&self, img: &RgbImage) -> hudsal::Result<GrayMap> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        GrayMap::zeros(img.width(), img.height())
    }
}

#[test]
fn invalid_batch_performs_no_saliency_work() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_batch(dir.path(), &["a", "b", "c"]);
    let backend = Counting {
        calls: AtomicUsize::new(0),
    };

    let plan = manifest::prepare(&manifest, None).unwrap();
    let report = commands::run_plan(&plan, &backend).unwrap();
    assert_eq!(backend.calls.load(Ordering::SeqCst), 6);
    assert_eq!(report.backend, "custom");

    let text = std::fs::read_to_string(&manifest).unwrap();
    let broken = text.replacen("\"w\":256", "\"w\":999", 1);
    assert_ne!(text, broken);
    std::fs::write(&manifest, broken).unwrap();
    let err = manifest::prepare(&manifest, None).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert_eq!(backend.calls.load(Ordering::SeqCst), 6);
}

#[test]
fn composite_with_black_hud_reproduces_background() {
    let dir = tempfile::tempdir().unwrap();
    let bg = dir.path().join("bg.png");
    let hud = dir.path().join("hud.png");
    write_png(&bg, &street_scene(320, 288, REGION, 0.3));
    write_png(&hud, &RgbImage::black(100, 80).unwrap());
    let out = dir.path().join("nested").join("out.png");
    let res = hudsal(&[
        "composite",
        "--background",
        s(&bg),
        "--hud",
        s(&hud),
        "--region",
        "10,20,200,150",
        "--out",
        s(&out),
        "--gain",
        "2.5",
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&bg).unwrap());
}

#[test]
fn composite_rejects_bad_gain() {
    let dir = tempfile::tempdir().unwrap();
    let bg = dir.path().join("bg.png");
    write_png(&bg, &RgbImage::black(16, 16).unwrap());
    for gain in ["0", "-1", "5"] {
        let res = hudsal(&[
            "composite",
            "--background",
            s(&bg),
            "--hud",
            s(&bg),
            "--region",
            "0,0,4,4",
            "--out",
            "x.png",
            "--gain",
            gain,
        ]);
        assert_eq!(res.status.code(), Some(2), "gain {gain}");
        assert!(stderr(&res).contains("--gain"));
    }
}

#[test]
fn sweep_writes_one_report_per_color_and_a_ranking() {
    let dir = tempfile::tempdir().unwrap();
    let bg = dir.path().join("bg.png");
    let mask = dir.path().join("glyph.png");
    write_png(&bg, &street_scene(512, 384, STREET_REGION, 0.4));
    write_png(&mask, &glyph_mask(16));
    let out = dir.path().join("sweep");
    let res = hudsal(&[
        "sweep",
        "--background",
        s(&bg),
        "--hud",
        s(&mask),
        "--region",
        "128,64,256,256",
        "--out",
        s(&out),
        "--gain",
        "1.5",
        "--colors",
        "FFFFFF,FF0000,00ff00,#0000FF",
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    for hex in ["FFFFFF", "FF0000", "00FF00", "0000FF"] {
        assert!(out.join(format!("composite_{hex}.png")).is_file());
        let r = read_json(&out.join(format!("report_{hex}.json")));
        assert_eq!(r["gain"], 1.5);
        assert_eq!(r["cases"][0]["id"], hex);
    }
    let summary = read_json(&out.join("ranking.json"));
    assert_eq!(summary["cases"].as_array().unwrap().len(), 4);
    let rankings = summary["rankings"].as_array().unwrap();
    assert_eq!(rankings.len(), 1);
    assert_eq!(rankings[0]["entries"][0]["id"], "FF0000");
}

#[test]
fn sweep_rejects_malformed_colors() {
    for colors in ["FF000", "red", "FF0000,FF0000"] {
        let res = hudsal(&[
            "sweep",
            "--background",
            "b.png",
            "--hud",
            "h.png",
            "--region",
            "0,0,4,4",
            "--out",
            "o",
            "--colors",
            colors,
        ]);
        assert_eq!(res.status.code(), Some(2), "{colors}: {}", stderr(&res));
    }
}

#[test]
fn saliency_command_writes_map_of_input_size() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.png");
    write_png(
        &input,
        &street_scene(300, 260, Region::new(0, 0, 300, 260), 0.1),
    );
    let out = dir.path().join("s.png");
    let res = hudsal(&["saliency", "--input", s(&input), "--out", s(&out)]);
    assert!(res.status.success(), "{}", stderr(&res));
    let img = hudsal::load_png(&out).unwrap();
    assert_eq!((img.width(), img.height()), (300, 260));
    assert!(img.pixels().iter().any(|p| p[0] == 255));
}

#[test]
fn invalid_jobs_env_exits_2() {
    let res = std::process::Command::new(bin())
        .args([
            "composite",
            "--background",
            "a",
            "--hud",
            "b",
            "--region",
            "0,0,1,1",
            "--out",
            "c",
        ])
        .env("HUDSAL_JOBS", "zero")
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("--jobs"));
}
