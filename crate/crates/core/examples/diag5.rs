use redos_core::analysis::{analyse_pattern, AnalysisConfig, AttackStatus, PipelineConfig};
use redos_core::testgen::{GenConfig, PatternGen};
use std::time::{Duration, Instant};

fn main() {
    let mut gen = PatternGen::new(5150, GenConfig { max_depth: 4, ..Default::default() });
    let cfg = PipelineConfig {
        analysis: AnalysisConfig { time_budget: Some(Duration::from_secs(10)), ..Default::default() },
        ..Default::default()
    };
    let mut counts = (0, 0, 0); // total, notpumpable, err
    let t0 = Instant::now();
    for i in 0..300 {
        let pattern = gen.pattern();
        let t1 = Instant::now();
        match analyse_pattern(&pattern, &cfg) {
            Ok(res) => {
                let np = res.configs.iter().all(|c| c.status == AttackStatus::NotPumpable);
                counts.1 += np as usize;
            }
            Err(_) => counts.2 += 1,
        }
        counts.0 += 1;
        let dt = t1.elapsed();
        if dt.as_millis() > 800 {
            println!("[{i}] SLOW {:?} {dt:?}", pattern);
        }
    }
    println!("total={} notpumpable={} err={} elapsed={:?}", counts.0, counts.1, counts.2, t0.elapsed());
}
