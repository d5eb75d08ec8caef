use std::env;
use std::time::Instant;

use kandinsky_core::hardness::{corner_blocker, one_bend_gadget};
use kandinsky_core::oracle::{exists, min_bends, SearchConfig};

fn main() {
    let which = env::args().nth(1).unwrap_or_default();
    match which.as_str() {
        "free2" => {
            let b = corner_blocker(2);
            let t = Instant::now();
            let free = min_bends(&b.graph, &SearchConfig::default()).unwrap();
            eprintln!("free2 min={} in {:.2?}", free.0, t.elapsed());
        }
        "blocked2" => {
            let b = corner_blocker(2);
            let cfg = SearchConfig {
                corner_pins: b.pocket_darts.iter().map(|&d| (d, 2)).collect(),
                ..Default::default()
            };
            let t = Instant::now();
            let blocked = min_bends(&b.graph, &cfg).unwrap();
            eprintln!("blocked2 min={} in {:.2?}", blocked.0, t.elapsed());
        }
        "rungs2" => {
            let b = corner_blocker(2);
            let pins: Vec<_> = b.pocket_darts.iter().map(|&d| (d, 2)).collect();
            for budget in 0..=6u32 {
                let cfg = SearchConfig {
                    total_bend_budget: budget,
                    corner_pins: pins.clone(),
                    ..Default::default()
                };
                let t = Instant::now();
                let found = exists(&b.graph, &cfg).unwrap().is_some();
                eprintln!("  budget {budget}: exists={found} in {:.2?}", t.elapsed());
            }
        }
        "gamma" => {
            let g = one_bend_gadget();
            let cfg = SearchConfig {
                total_bend_budget: 3,
                corner_pins: g.apex_darts.iter().map(|&d| (d, 2)).collect(),
                ..Default::default()
            };
            let t = Instant::now();
            let m = min_bends(&g.graph, &cfg).unwrap();
            eprintln!("gamma min={} in {:.2?}", m.0, t.elapsed());
        }
        other => eprintln!("unknown probe {other:?}"),
    }
}
