use std::process::Command;

// Appends a git-describe suffix to the version when built from a checkout.
fn main() {
    println!("cargo:rerun-if-changed=../../.git/HEAD");
    println!("cargo:rerun-if-changed=../../.git/index");
    let suffix = Command::new("git")
        .args(["describe", "--always", "--dirty", "--abbrev=7", "--exclude=*"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| format!("-g{}", s.trim()))
        .unwrap_or_default();
    println!("cargo:rustc-env=TELEGRAPH_GIT_SUFFIX={suffix}");
}
