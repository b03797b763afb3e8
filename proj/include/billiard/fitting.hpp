#ifndef BILLIARD_FITTING_HPP
#define BILLIARD_FITTING_HPP

#include <vector>

#include "billiard/invariants.hpp"
#include "billiard/spectrum.hpp"

namespace billiard {

/// Weighted least-squares fit of gamma_length - perimeter against powers
/// u, u^2, ..., u^K of u = Q^{2/3} (no constant term; the expansion starts
/// at u).
struct ExpansionFit {
    int order = 0;
    std::vector<double> coefficients; // c_1 .. c_K
    std::vector<double> stderrs;      // 1-sigma, from the weighted normal system
    double residual_rms = 0.0;        // unweighted rms of the fit residuals
    double condition_number = 0.0;    // of the u-scaled design matrix
    double u_min = 0.0;
    double u_max = 0.0;
    int n_samples = 0;
};

/// Weights are 1/err_bar^2 (with a floor for exact samples). The powers are
/// fitted on u/u_max to tame conditioning and unscaled afterwards. Requires
/// at least order + 2 samples with distinct positive Q. Throws
/// IllConditioned when the scaled design condition number exceeds 1e12.
ExpansionFit fit_expansion(const std::vector<CausticEstimate>& estimates, double perimeter,
                           int order);

/// Per-domain ratio r_k = c_k / I_k. The expansion coefficients are known
/// only up to a universal constant per order, so the testable statement is
/// that r_k does not depend on the domain. Entries whose coefficient is
/// below 3 sigma of fit noise are flagged indeterminate.
struct RatioEntry {
    double coefficient = 0.0;
    double invariant = 0.0;
    double ratio = 0.0;
    bool indeterminate = false;
};

std::vector<RatioEntry> ratio_consistency(const std::vector<ExpansionFit>& fits,
                                          const std::vector<InvariantVector>& invariants,
                                          int k);

} // namespace billiard

#endif
