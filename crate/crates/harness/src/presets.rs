//! Paper-protocol parameter sets per problem and variant.

use wrfss::engine::VariantKind;
use wrfss_cec2010::BenchId;

use crate::config::ExperimentConfig;

pub const PAPER_ITERATIONS: u64 = 80_000;
pub const DESK_ITERATIONS: u64 = 5_000;
pub const PAPER_RUNS: usize = 30;

/// Problems tuned like C01 (large feasible region) versus like C03.
fn tuned_like_c01(id: BenchId) -> bool {
    matches!(id, BenchId::C01 | BenchId::C07 | BenchId::C08)
}

pub fn paper_preset(id: BenchId, variant: VariantKind, desk: bool) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(id, variant);
    c.experiment.runs = PAPER_RUNS;
    c.engine.iterations = if desk { DESK_ITERATIONS } else { PAPER_ITERATIONS };
    let (sigma, tau) = match variant {
        VariantKind::Base => (0.05, 0.01),
        VariantKind::Epsilon => (0.05, 0.30),
        VariantKind::Gradient => (0.50, 0.01),
        VariantKind::Penalty => (0.05, 0.30),
    };
    c.engine.sigma = sigma;
    c.engine.tau = tau;
    c.epsilon.control_fraction = 0.60;
    c.epsilon.cp_min = if tuned_like_c01(id) { 3.0 } else { 8.0 };
    c.probe.probability = 0.10;
    c.probe.directions = if tuned_like_c01(id) { 200 } else { 50 };
    c
}

pub fn all_presets(desk: bool) -> Vec<ExperimentConfig> {
    BenchId::ALL
        .into_iter()
        .flat_map(|id| VariantKind::ALL.into_iter().map(move |v| paper_preset(id, v, desk)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_eight_presets() {
        assert_eq!(all_presets(false).len(), 28);
    }

    #[test]
    fn epsilon_on_c03() {
        let c = paper_preset(BenchId::C03, VariantKind::Epsilon, false);
        assert_eq!(c.epsilon.control_fraction, 0.60);
        assert_eq!(c.epsilon.cp_min, 8.0);
        assert_eq!(c.engine.sigma, 0.05);
        assert_eq!(c.engine.tau, 0.30);
        assert_eq!(c.engine.iterations, 80_000);
    }

    #[test]
    fn gradient_and_penalty_rows() {
        let g = paper_preset(BenchId::C08, VariantKind::Gradient, true);
        assert_eq!((g.probe.probability, g.probe.directions), (0.10, 200));
        assert_eq!((g.engine.sigma, g.engine.tau), (0.50, 0.01));
        assert_eq!(g.engine.iterations, 5_000);
        assert_eq!(paper_preset(BenchId::C09, VariantKind::Gradient, true).probe.directions, 50);
        let p = paper_preset(BenchId::C01, VariantKind::Penalty, false);
        assert_eq!((p.engine.sigma, p.engine.tau), (0.05, 0.30));
        for c in all_presets(false) {
            c.validate().unwrap();
        }
    }
}
