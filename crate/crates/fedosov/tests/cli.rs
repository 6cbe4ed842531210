use fedosov::cli::run;
use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("fedosov").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text.trim()).unwrap()
}

#[test]
fn dims_output_is_exact() {
    let (code, out, _) = invoke(&["dims", "3"]);
    assert_eq!(code, 0);
    assert_eq!(
        out.trim(),
        r#"{"C":27,"S":18,"C_omega":18,"S_omega":10,"Lambda3":1,"residual":0}"#
    );
    let (code, _, err) = invoke(&["dims", "0"]);
    assert_eq!(code, 2);
    assert_eq!(json(&err)["error"]["kind"], "usage");
}

#[test]
fn check_passes_on_fixtures() {
    for name in ["flat.json", "hyperbolic.json", "sphere_R1.json"] {
        let (code, out, err) = invoke(&["check", &fixture(name)]);
        assert_eq!(code, 0, "{name}: {err}");
        assert_eq!(json(&out)["passed"], true);
    }
}

#[test]
fn sectional_on_the_sphere() {
    let (code, out, _) = invoke(&[
        "sectional",
        &fixture("sphere_R2.json"),
        "--x",
        "1,0",
        "--y",
        "0,1",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["kind"], "elliptic");
    let (code, _, err) = invoke(&[
        "sectional",
        &fixture("sphere_R2.json"),
        "--x",
        "1,1",
        "--y",
        "2,2",
    ]);
    assert_eq!(code, 2);
    assert_eq!(json(&err)["error"]["kind"], "domain");
}

#[test]
fn curvature_ricci_and_normal_tensors_emit_json() {
    let h = fixture("hyperbolic.json");
    let (code, out, _) = invoke(&["curvature", &h, "--at-base"]);
    assert_eq!(code, 0);
    assert!(json(&out)["R"].is_array());
    let (code, out, _) = invoke(&["ricci", &h]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["einstein"], false);
    let (code, out, _) = invoke(&["normal-tensors", &h, "--rmax", "2"]);
    assert_eq!(code, 0);
    assert!(json(&out).is_object());
    let (code, _, err) = invoke(&["normal-tensors", &h, "--rmax", "9"]);
    assert_eq!(code, 2);
    assert_eq!(json(&err)["error"]["kind"], "order");
}

#[test]
fn errors_are_json_on_stderr() {
    let (code, out, err) = invoke(&["check", "/nonexistent/chart.json"]);
    assert_eq!((code, out.as_str()), (2, ""));
    assert_eq!(json(&err)["error"]["kind"], "io");
    let (code, _, err) = invoke(&["frobnicate"]);
    assert_eq!(code, 2);
    assert_eq!(json(&err)["error"]["kind"], "usage");
}

#[test]
fn output_is_byte_stable() {
    let args = [
        "normal-tensors",
        &fixture("sphere_R3_2.json"),
        "--rmax",
        "2",
    ];
    let args: Vec<&str> = args.iter().map(|s| s.as_ref()).collect();
    assert_eq!(invoke(&args).1, invoke(&args).1);
    let sel = ["selftest", "--charts", "3", "--seed", "5"];
    let (code, a, _) = invoke(&sel);
    assert_eq!(code, 0);
    assert_eq!(a, invoke(&sel).1);
    assert!(a.lines().all(|l| json(l)["passed"] == json(l)["total"]));
}

#[test]
fn realize_round_trip() {
    let (code, out, err) = invoke(&["realize", &fixture("point_curvature.json")]);
    assert_eq!(code, 0, "{err}");
    let dir = std::env::temp_dir().join(format!("fedosov-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("realized.json");
    std::fs::write(&path, &out).unwrap();
    let (code, again, _) = invoke(&["curvature", path.to_str().unwrap(), "--at-base"]);
    assert_eq!(code, 0);
    let point: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("point_curvature.json")).unwrap())
            .unwrap();
    assert_eq!(json(&again)["R"], point["R0"]);
    let (code, check, _) = invoke(&["check", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(json(&check)["passed"], true);
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"omega0": [["0","1"],["-1","0"]], "R0": [[[["1","0"],["0","0"]],[["0","0"],["0","0"]]],[[["0","0"],["0","0"]],[["0","0"],["0","0"]]]]}"#).unwrap();
    let (code, _, err) = invoke(&["realize", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(json(&err)["error"]["kind"], "condition");
    std::fs::remove_dir_all(&dir).unwrap();
}
