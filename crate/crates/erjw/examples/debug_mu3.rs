use erjw::bss::graded::{gr_d1_step, GradedState, Space, Tag};
use erjw::smash::{order_compare, MonomialKey, SmashCtx};

fn main() {
    let n = 3;
    let len = 12;
    let ctx = SmashCtx::new(n, len).unwrap();
    let mut state = GradedState::new(Space::Mu, n, len, 4);
    for stage in 0..=2 {
        println!("== applying stage {stage}");
        match gr_d1_step(&state, &ctx) {
            Ok(next) => {
                let mut pairings: Vec<_> =
                    next.pairings.iter().filter(|p| p.stage == stage).collect();
                pairings.sort_by(|a, b| order_compare(&a.source, &b.source));
                for p in pairings.iter().take(40) {
                    println!("   {} -> {} (level {})", p.source, p.target, p.v1_level);
                }
                let probe = MonomialKey::new(vec![2, 1, 1], vec![false, true, false]);
                println!(
                    "   probe tag of {}: {:?} (len {})",
                    probe,
                    next.tag_of(&probe),
                    probe.length()
                );
                let free = next.live.values().filter(|t| **t == Tag::Free).count();
                let capped = next.live.values().filter(|t| **t == Tag::Capped).count();
                println!("   live: {} free, {} capped; gone {}", free, capped, next.gone.len());
                state = next;
            }
            Err(e) => {
                println!("   ERROR: {e}");
                break;
            }
        }
    }
}
