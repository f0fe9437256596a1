#pragma once

#include <string>
#include <utility>
#include <vector>

#include "opo/spectra.hpp"

namespace opo {

// The five partition classes. S1 separates the pump from all signals, S2 one
// EPR pair from the rest, S3 a set of k pairs from the other n-k, S4 the bare
// signal modes a_1..a_k from everything else, S2prime is S2 without pump
// weights.
enum class VlfKind { S1, S2, S3, S4, S2prime };

VlfKind vlf_kind_from_string(const std::string& s);
std::string to_string(VlfKind k);

struct VlfCase {
    VlfKind kind = VlfKind::S1;
    int j = 1;       // distinguished pair (S2, S4, S2prime)
    int k = 1;       // split position (S3, S4)
    double x = 1.0;  // free pump weight (S1, S2, S3)
    Witness u, v;
    double bound = 0.0;
};

struct VlfResult {
    double S = 0.0;
    double bound = 0.0;
    double violation = 0.0;  // S - bound; negative certifies inseparability
    double x_opt = 0.0;
    bool converged = false;
    bool boundary_pinned = false;
};

struct SurfaceGrid {
    std::vector<double> sigma_axis;
    std::vector<int> n_axis;
    VlfKind kind = VlfKind::S1;
    // row-major over (n, sigma); raw S and bound kept so the surface can be
    // renormalized without re-running
    std::vector<double> violation, x_opt, S, bound;
    std::vector<char> valid;

    size_t cell(size_t ni, size_t si) const { return ni * sigma_axis.size() + si; }
};

bool kind_has_x(VlfKind k);

// Builds the witness pair, the separability bound and the partition for one
// case. Bounds come from the generic two-sided sum 2(|sum_A h g| + |sum_B h g|),
// which reduces to 8n, 8(n-1), 8k(n-k), 4(n-k) and 8(n-1) for the equal
// profile and stays correct for any other profile.
VlfCase build_case(VlfKind kind, const OpoParams& p, const SteadyState& ss, int j, int k,
                   double x);

VlfResult evaluate(const VlfCase& c, const OpoParams& p, const SteadyState& ss);
VlfResult evaluate(const VlfCase& c, TransferCache& cache);

// Minimizes S(x) over x in [1e-3, 1e3] by golden-section search on log x,
// seeded and sanity-checked by a coarse log-grid pre-scan.
std::pair<double, VlfResult> optimize_x(VlfKind kind, const OpoParams& p, const SteadyState& ss,
                                        int j = 1, int k = 1);

// Per-cell optimization (where the kind has an x) over a (sigma, n) grid.
// threads = 0 picks the OPOCOMB_THREADS environment value or the hardware
// concurrency. Failed cells are masked, never zero-filled.
SurfaceGrid scan_surface(VlfKind kind, const std::vector<double>& sigma_axis,
                         const std::vector<int>& n_axis, const OpoParams& tmpl, int j = 1,
                         int k = 1, int threads = 0);

int resolve_thread_count(int requested);

}  // namespace opo
