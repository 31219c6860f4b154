use erjw::bss::{run_pages, Space};
use erjw::smash::SmashCtx;

fn main() {
    for (space, n, len) in [
        (Space::Smash, 1usize, 10u32),
        (Space::Smash, 2, 10),
        (Space::Mu, 2, 10),
        (Space::Mu, 3, 12),
    ] {
        let ctx = SmashCtx::new(n, len).unwrap();
        match run_pages(space, n, len, 4, &ctx) {
            Ok(pages) => {
                let cutoff = pages.trusted_len();
                println!("== {} n={} len={}", space.as_str(), n, len);
                println!("page-2 entries (trusted):");
                for (k, t) in pages.graded.page2_entries(cutoff) {
                    println!("   {k}   {t:?}");
                }
                println!("page-4 keys:");
                for k in &pages.d3.page4 {
                    if k.length() <= cutoff {
                        println!("   {k}");
                    }
                }
                println!("x3 torsion:");
                for t in pages.torsion_trusted(3, cutoff) {
                    println!("   key {}  shift {}  block {}", t.key, t.v1_shift, t.block.as_str());
                }
                println!("x7 torsion:");
                for t in pages.torsion_trusted(7, cutoff) {
                    println!("   key {}  deg {}", t.key, (t.key.degree()).rem_euclid(48));
                }
                let t1 = pages.torsion_trusted(1, cutoff);
                println!("x1 torsion entries: {} total", t1.len());
                for t in t1.iter().take(8) {
                    println!(
                        "   stage {} key {} shift {} block {}",
                        t.stage,
                        t.key,
                        t.v1_shift,
                        t.block.as_str()
                    );
                }
            }
            Err(e) => println!("== {} n={}: ERROR {e}", space.as_str(), n),
        }
    }
}
