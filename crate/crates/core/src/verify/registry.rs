//! Every check the runner knows, with its suite, kind and pass tolerance.

use super::{experiments, identities, inequalities, CheckContext, CheckKind, Outcome, Suite};
use crate::error::Result;

pub struct CheckInfo {
    pub id: &'static str,
    pub suite: Suite,
    pub kind: CheckKind,
    /// Registered tolerance; `tolerances.<id>` in the config overrides it.
    pub tolerance: f64,
    pub summary: &'static str,
    pub run: fn(&CheckContext) -> Result<Outcome>,
}

const fn hard(
    id: &'static str,
    suite: Suite,
    tolerance: f64,
    summary: &'static str,
    run: fn(&CheckContext) -> Result<Outcome>,
) -> CheckInfo {
    CheckInfo {
        id,
        suite,
        kind: CheckKind::Hard,
        tolerance,
        summary,
        run,
    }
}

pub static REGISTRY: &[CheckInfo] = &[
    hard("gram_identity", Suite::Identities, 1e-10,
        "boundary quadrature of |F_N|^2 against the Gram form", identities::gram_identity),
    hard("poisson_variance_identity", Suite::Identities, 1e-9,
        "Poisson variance closed form against quadrature", identities::poisson_variance_identity),
    hard("poisson_reproducing", Suite::Identities, 1e-10,
        "Poisson integral of boundary values reproduces F_N inside", identities::poisson_reproducing),
    hard("chain_rule", Suite::Identities, 1e-10,
        "hyperbolic derivative of f^n: direct against chain product", identities::chain_rule),
    hard("dirichlet_three_way", Suite::Identities, 1e-6,
        "Dirichlet form: closed form, Taylor coefficients, symbol sandwich", identities::dirichlet_three_way),
    hard("l2_sandwich", Suite::Inequalities, 1e-12,
        "L2 norm between (1-|l|)/(1+|l|) and (1+|l|)/(1-|l|) times sum |a_n|^2", inequalities::l2_sandwich),
    hard("schwarz_majorant", Suite::Inequalities, 1e-12,
        "|f(z)| <= psi(|z|) <= |z| and |f| = 1 on the circle", inequalities::schwarz_majorant_check),
    hard("distance_inequality", Suite::Inequalities, 1e-12,
        "1 - |z| <= c (1 - |f(z)|) near the circle", inequalities::distance_inequality),
    hard("superattracting_doubling", Suite::Inequalities, 1e-12,
        "|f^n(z)| <= |z|^(2^n) when f'(0) = 0", inequalities::superattracting_doubling),
    hard("geometric_decay", Suite::Inequalities, 1e-12,
        "fitted geometric decay of orbits on held-out points", inequalities::geometric_decay),
    hard("paley_zygmund", Suite::Inequalities, 1e-9,
        "Paley-Zygmund for Z = |F_N|^2 under the boundary grid measure", inequalities::paley_zygmund),
    hard("block_lower_bound", Suite::Inequalities, 1e-9,
        "block variance lower bound once |f^M(z)| <= eps", inequalities::block_lower_bound),
    hard("variance_constant", Suite::Inequalities, 0.0,
        "measured BMOA constant, stable under grid doubling", inequalities::variance_constant),
    hard("hp_constant", Suite::Inequalities, 0.0,
        "measured H^p equivalence constant, stable under grid doubling", inequalities::hp_constant),
    hard("dirichlet_symbol_sandwich", Suite::Inequalities, 1e-12,
        "Dirichlet form between the Toeplitz symbol bounds", inequalities::dirichlet_symbol_sandwich),
    hard("bloch_constant", Suite::Inequalities, 0.0,
        "measured Bloch constant, stable under grid doubling", inequalities::bloch_constant),
    hard("convergence", Suite::Experiments, 1e-10,
        "block identity and decay for l2 coefficients, divergence signature otherwise", experiments::convergence_experiment),
    CheckInfo {
        id: "unboundedness",
        suite: Suite::Experiments,
        kind: CheckKind::Signature,
        tolerance: 0.0,
        summary: "strict growth of the grid sup of |F_N| along a refinement ladder",
        run: experiments::unboundedness_experiment,
    },
    hard("vmoa_decay", Suite::Experiments, 0.0,
        "max Poisson variance decays along the radius ladder", experiments::vmoa_decay_experiment),
];

pub fn find_check(id: &str) -> Option<&'static CheckInfo> {
    REGISTRY.iter().find(|c| c.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_sorted_lookup_works() {
        let mut ids: Vec<&str> = REGISTRY.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), REGISTRY.len());
        assert!(find_check("gram_identity").is_some());
        assert!(find_check("nope").is_none());
    }
}
