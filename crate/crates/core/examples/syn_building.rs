//! Generates the synthetic building family and prints the dataset statistics
//! for every variant.
//!
//!     cargo run --example syn_building -- 5 /tmp/syn

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use isq::benchgen::{dataset_stats, generate_syn, SynConfig, Variant};
use isq::format::write_space;
use isq::iptree::DEFAULT_GAMMA;

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let floors: u32 = args.next().map_or(5, |s| s.parse().expect("floor count"));
    let out: Option<PathBuf> = args.next().map(PathBuf::from);

    println!("dataset  floors  doors  stair  parts  halls  crucial  #dv Q1/Q2/Q3/max  extent");
    for v in [Variant::Default, Variant::Minus, Variant::Plus, Variant::NoDecomp] {
        let cfg = SynConfig::new(floors).with_variant(v).with_seed(1);
        let space = generate_syn(&cfg);
        let st = dataset_stats(&space, DEFAULT_GAMMA);
        println!(
            "{:<8} {:>6} {:>6} {:>6} {:>6} {:>6} {:>8}  {}/{}/{}/{:<10} {}x{}",
            cfg.dataset_name(),
            st.floors,
            st.doors,
            st.stair_doors,
            st.partitions,
            st.hallways,
            st.crucial,
            st.q1,
            st.q2,
            st.q3,
            st.max,
            st.length,
            st.width
        );
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}.space", cfg.dataset_name()));
            write_space(&space, BufWriter::new(File::create(&path)?))?;
            println!("         wrote {}", path.display());
        }
    }
    Ok(())
}
