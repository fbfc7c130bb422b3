use clap::Args;
use momreg_core::error::Result;
use momreg_harness::all_oracles;

#[derive(Args)]
pub struct OraclesArgs {}

pub fn run(_args: OraclesArgs) -> Result<i32> {
    let reports = all_oracles();
    let mut all_pass = true;
    for report in &reports {
        println!(
            "{} {} max_slack={:e} ({})",
            if report.pass { "PASS" } else { "FAIL" },
            report.name,
            report.max_slack,
            report.detail
        );
        all_pass &= report.pass;
    }
    Ok(if all_pass { 0 } else { 4 })
}
