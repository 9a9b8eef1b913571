use std::path::Path;

use paramcsp::campaign::{run_campaign, CampaignConfig};

use crate::files::write;
use crate::Verdict;

/// Runs a campaign. The summary on stdout depends only on the arguments;
/// timings go to stderr.
pub fn run(rule: &str, trials: usize, seed: u64, caps: [Option<usize>; 4], out: Option<&Path>) -> Verdict {
    let mut cfg = CampaignConfig::new(rule, trials, seed).map_err(|e| e.to_string())?;
    let [n, dom, d, k] = caps;
    let c = &mut cfg.caps;
    c.n = n.unwrap_or(c.n);
    c.dom = dom.unwrap_or(c.dom);
    c.d = d.unwrap_or(c.d);
    c.k = k.unwrap_or(c.k);
    let rep = run_campaign(&cfg).map_err(|e| e.to_string())?;
    let summary = rep.summary();
    print!("{summary}");
    let t = rep.timing();
    eprintln!("timing p50 {:?} p90 {:?} p99 {:?} max {:?}", t.p50, t.p90, t.p99, t.max);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let json = serde_json::to_string_pretty(&rep).map_err(|e| e.to_string())?;
        write(&dir.join(format!("{rule}-{seed}.json")), &(json + "\n"))?;
        write(&dir.join(format!("{rule}-{seed}.txt")), &summary)?;
    }
    Ok(rep.ok())
}
