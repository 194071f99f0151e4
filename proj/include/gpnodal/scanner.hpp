#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <thread>
#include <unordered_map>
#include <vector>

#include "gpnodal/entanglement.hpp"
#include "gpnodal/phases.hpp"

namespace gpnodal {

struct AxisSpec {
    int n = 2;
    double lo = 0.0;
    double hi = 1.0;

    double at(int i) const { return lo + (hi - lo) * i / (n - 1); }
    double step() const { return (hi - lo) / (n - 1); }
};

/// Grid specification shared by the free ((theta, beta) per r) and Ising
/// ((theta, J) per r) scans. omega_t is the fixed product omega*t.
struct ScanGrid {
    AxisSpec theta{512, 0.0, kPi};
    AxisSpec beta{512, 0.0, kPi};
    AxisSpec coupling{256, 0.0, 0.5};
    std::vector<double> r_values{1.0};
    double omega_t = kPi;

    void validate() const {
        if (theta.n < 2 || beta.n < 2 || coupling.n < 2)
            throw std::invalid_argument("grid axes need at least 2 samples");
        if (r_values.empty()) throw std::invalid_argument("r_values must be nonempty");
        for (double r : r_values)
            if (!(r > 0.0) || r > 1.0) throw std::invalid_argument("r must be in (0, 1]");
        if (!(omega_t > 0.0)) throw std::invalid_argument("omega_t must be > 0");
    }
};

/// A refined zero of the trace. `second` is beta for free scans and J for
/// Ising scans. Grazing marks a tangency (singular Jacobian at residual).
struct NodalPoint {
    double theta = 0.0;
    double second = 0.0;
    double r = 0.0;
    double residual = 0.0;
    bool grazing = false;
};

struct Polyline {
    enum class Kind { re_zero, im_zero };
    int id = 0;
    Kind kind = Kind::re_zero;
    double r = 0.0;
    std::vector<std::array<double, 2>> points;  // (theta, J)
};

struct NodalScanResult {
    ScanGrid grid;
    bool ising = false;
    double beta_fixed = 0.0;
    StateVariant variant = StateVariant::phi;
    /// trace[r_index][i_theta * n_second + i_second]
    std::vector<std::vector<Complex>> trace;
    std::vector<NodalPoint> nodal_points;
    std::vector<Polyline> curves;
};

namespace detail {

/// Run fn(row) for row in [0, n). Results must be written to row-indexed
/// storage; the assembly is then independent of the worker count.
template <typename F>
void parallel_rows(int n, int workers, F&& fn) {
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto body = [&] {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (std::thread& t : pool) t.join();
}

/// Bisect g (continuous, g(a)*g(b) < 0) to |g| < tol; returns the abscissa.
template <typename G>
double bisect_zero(G&& g, double a, double b, double tol) {
    double fa = g(a);
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = g(m);
        if (std::abs(fm) < tol) return m;
        if ((fa < 0.0) != (fm < 0.0)) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

struct Segment {
    std::array<double, 2> p0, p1;
    std::int64_t k0, k1;  // grid-edge keys of the endpoints
};

/// Marching squares over one scalar field; emits segments with endpoint
/// edge keys so curves can be chained afterwards. field(i,j) indexed theta
/// (axis a) major.
template <typename Field>
void marching_squares(const AxisSpec& a, const AxisSpec& b, Field&& field,
                      std::vector<Segment>& out, std::vector<std::vector<int>>& cell_segments) {
    const auto hkey = [&](int i, int j) {
        return (static_cast<std::int64_t>(0) * a.n + i) * (b.n + 1) + j;
    };
    const auto vkey = [&](int i, int j) {
        return (static_cast<std::int64_t>(1) * a.n + i) * (b.n + 1) + j;
    };
    cell_segments.assign(static_cast<std::size_t>((a.n - 1) * (b.n - 1)), {});
    for (int i = 0; i + 1 < a.n; ++i) {
        for (int j = 0; j + 1 < b.n; ++j) {
            const double v00 = field(i, j), v10 = field(i + 1, j);
            const double v01 = field(i, j + 1), v11 = field(i + 1, j + 1);
            const int c = (v00 >= 0.0 ? 1 : 0) | (v10 >= 0.0 ? 2 : 0) | (v11 >= 0.0 ? 4 : 0) |
                          (v01 >= 0.0 ? 8 : 0);
            if (c == 0 || c == 15) continue;
            const double x0 = a.at(i), x1 = a.at(i + 1);
            const double y0 = b.at(j), y1 = b.at(j + 1);
            const auto lerp = [](double v_lo, double v_hi) {
                const double d = v_lo - v_hi;
                return d == 0.0 ? 0.5 : v_lo / d;
            };
            // Crossing points on the four cell edges (bottom, right, top, left).
            const std::array<std::array<double, 2>, 4> pt{
                {{x0 + (x1 - x0) * lerp(v00, v10), y0},
                 {x1, y0 + (y1 - y0) * lerp(v10, v11)},
                 {x0 + (x1 - x0) * lerp(v01, v11), y1},
                 {x0, y0 + (y1 - y0) * lerp(v00, v01)}}};
            const std::array<std::int64_t, 4> key{hkey(i, j), vkey(i + 1, j), hkey(i, j + 1),
                                                  vkey(i, j)};
            const auto emit = [&](int ea, int eb) {
                cell_segments[static_cast<std::size_t>(i * (b.n - 1) + j)].push_back(
                    static_cast<int>(out.size()));
                out.push_back({pt[static_cast<std::size_t>(ea)], pt[static_cast<std::size_t>(eb)],
                               key[static_cast<std::size_t>(ea)],
                               key[static_cast<std::size_t>(eb)]});
            };
            switch (c) {
                case 1: case 14: emit(3, 0); break;
                case 2: case 13: emit(0, 1); break;
                case 3: case 12: emit(3, 1); break;
                case 4: case 11: emit(1, 2); break;
                case 6: case 9:  emit(0, 2); break;
                case 7: case 8:  emit(2, 3); break;
                case 5: case 10: {
                    // Saddle: use the cell-center sign to pick the pairing.
                    const double center = 0.25 * (v00 + v10 + v01 + v11);
                    const bool center_in = center >= 0.0;
                    if ((c == 5) == center_in) {
                        emit(3, 0);
                        emit(1, 2);
                    } else {
                        emit(0, 1);
                        emit(2, 3);
                    }
                    break;
                }
                default: break;
            }
        }
    }
}

/// Chain marching-squares segments into polylines via shared edge keys.
inline std::vector<std::vector<std::array<double, 2>>> chain_segments(
    const std::vector<Segment>& segs) {
    std::unordered_map<std::int64_t, std::vector<int>> by_key;
    for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
        by_key[segs[static_cast<std::size_t>(s)].k0].push_back(s);
        by_key[segs[static_cast<std::size_t>(s)].k1].push_back(s);
    }
    std::vector<bool> used(segs.size(), false);
    std::vector<std::vector<std::array<double, 2>>> chains;

    const auto other_end = [&](int s, std::int64_t key) {
        return segs[static_cast<std::size_t>(s)].k0 == key
                   ? std::pair{segs[static_cast<std::size_t>(s)].k1,
                               segs[static_cast<std::size_t>(s)].p1}
                   : std::pair{segs[static_cast<std::size_t>(s)].k0,
                               segs[static_cast<std::size_t>(s)].p0};
    };
    const auto walk = [&](int start, bool from_k0, std::vector<std::array<double, 2>>& pts) {
        std::int64_t key = from_k0 ? segs[static_cast<std::size_t>(start)].k1
                                   : segs[static_cast<std::size_t>(start)].k0;
        int cur = start;
        while (true) {
            const std::vector<int>& cands = by_key[key];
            int nxt = -1;
            for (int s : cands)
                if (s != cur && !used[static_cast<std::size_t>(s)]) {
                    nxt = s;
                    break;
                }
            if (nxt < 0) break;
            used[static_cast<std::size_t>(nxt)] = true;
            auto [nkey, npt] = other_end(nxt, key);
            pts.push_back(npt);
            key = nkey;
            cur = nxt;
        }
    };

    for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
        if (used[static_cast<std::size_t>(s)]) continue;
        used[static_cast<std::size_t>(s)] = true;
        std::vector<std::array<double, 2>> fwd{segs[static_cast<std::size_t>(s)].p0,
                                               segs[static_cast<std::size_t>(s)].p1};
        walk(s, true, fwd);
        std::vector<std::array<double, 2>> bwd;
        walk(s, false, bwd);
        std::reverse(bwd.begin(), bwd.end());
        bwd.insert(bwd.end(), fwd.begin(), fwd.end());
        chains.push_back(std::move(bwd));
    }
    return chains;
}

/// Intersection point of two 2-D segments, if they cross properly.
inline bool segment_intersection(const Segment& p, const Segment& q, std::array<double, 2>& out) {
    const double rx = p.p1[0] - p.p0[0], ry = p.p1[1] - p.p0[1];
    const double sx = q.p1[0] - q.p0[0], sy = q.p1[1] - q.p0[1];
    const double den = rx * sy - ry * sx;
    if (std::abs(den) < 1e-30) return false;
    const double qx = q.p0[0] - p.p0[0], qy = q.p0[1] - p.p0[1];
    const double t = (qx * sy - qy * sx) / den;
    const double u = (qx * ry - qy * rx) / den;
    if (t < -1e-9 || t > 1.0 + 1e-9 || u < -1e-9 || u > 1.0 + 1e-9) return false;
    out = {p.p0[0] + t * rx, p.p0[1] + t * ry};
    return true;
}

}  // namespace detail

/// Free-model scan over (theta, beta) for each r. Uses the closed-form
/// trace (real for the free model at omega*t = pi), detects sign changes
/// along grid edges and refines each by bisection to |trace| < 1e-10.
/// Grid nodes with |trace| < 1e-12 are nodal directly.
inline NodalScanResult scan_free(StateVariant variant, const ScanGrid& grid, int workers = 1) {
    grid.validate();
    NodalScanResult res;
    res.grid = grid;
    res.variant = variant;
    const int nt = grid.theta.n, nb = grid.beta.n;
    res.trace.assign(grid.r_values.size(),
                     std::vector<Complex>(static_cast<std::size_t>(nt) * nb));

    for (std::size_t ri = 0; ri < grid.r_values.size(); ++ri) {
        const double r = grid.r_values[ri];
        std::vector<Complex>& slice = res.trace[ri];
        detail::parallel_rows(nt, workers, [&](int i) {
            const double theta = grid.theta.at(i);
            for (int j = 0; j < nb; ++j)
                slice[static_cast<std::size_t>(i) * nb + j] =
                    analytic_trace({variant, r, theta, grid.beta.at(j)});
        });

        const auto f = [&](int i, int j) {
            return slice[static_cast<std::size_t>(i) * nb + j].real();
        };
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < nb; ++j) {
                const double v = f(i, j);
                if (std::abs(v) < 1e-12)
                    res.nodal_points.push_back(
                        {grid.theta.at(i), grid.beta.at(j), r, std::abs(v), false});
            }
        // theta-direction edges
        for (int j = 0; j < nb; ++j)
            for (int i = 0; i + 1 < nt; ++i) {
                const double va = f(i, j), vb = f(i + 1, j);
                if (va * vb >= 0.0) continue;
                const double beta = grid.beta.at(j);
                const double root = detail::bisect_zero(
                    [&](double th) { return analytic_trace({variant, r, th, beta}); },
                    grid.theta.at(i), grid.theta.at(i + 1), 1e-10);
                res.nodal_points.push_back(
                    {root, beta, r, std::abs(analytic_trace({variant, r, root, beta})), false});
            }
        // beta-direction edges
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j + 1 < nb; ++j) {
                const double va = f(i, j), vb = f(i, j + 1);
                if (va * vb >= 0.0) continue;
                const double theta = grid.theta.at(i);
                const double root = detail::bisect_zero(
                    [&](double be) { return analytic_trace({variant, r, theta, be}); },
                    grid.beta.at(j), grid.beta.at(j + 1), 1e-10);
                res.nodal_points.push_back(
                    {theta, root, r, std::abs(analytic_trace({variant, r, theta, root})), false});
            }
    }
    return res;
}

/// Ising scan over (theta, J) at fixed beta for each r. The trace field is
/// complex; nodal points are intersections of the Re=0 and Im=0 level sets,
/// refined by damped Newton on the full numeric pipeline. A root whose
/// finite-difference Jacobian is singular at residual < 1e-8 is flagged
/// grazing.
inline NodalScanResult scan_ising(StateVariant variant, const ScanGrid& grid, double beta,
                                  int workers = 1) {
    grid.validate();
    NodalScanResult res;
    res.grid = grid;
    res.variant = variant;
    res.ising = true;
    res.beta_fixed = beta;
    const int nt = grid.theta.n, nj = grid.coupling.n;
    const double omega = 1.0, t = grid.omega_t / omega;
    const std::size_t nr = grid.r_values.size();
    res.trace.assign(nr, std::vector<Complex>(static_cast<std::size_t>(nt) * nj));

    // U(t) depends only on J; the corrector frame only on theta. The trace
    // is affine in r: Tr[UV rho] = (1-r)/4 Tr[UV] + r <phi|UV|phi>.
    std::vector<ComplexMatrix> u_of_j(static_cast<std::size_t>(nj), ComplexMatrix(4));
    std::vector<ComplexMatrix> h_of_j(static_cast<std::size_t>(nj), ComplexMatrix(4));
    for (int j = 0; j < nj; ++j) {
        const ModelParams m{omega, omega, grid.coupling.at(j) * omega, t};
        h_of_j[static_cast<std::size_t>(j)] = hamiltonian_ising(m);
        u_of_j[static_cast<std::size_t>(j)] =
            evolution_operator(h_of_j[static_cast<std::size_t>(j)], t);
    }

    detail::parallel_rows(nt, workers, [&](int i) {
        const double theta = grid.theta.at(i);
        // Frame eigenvectors are independent of r.
        const SpectralDecomposition frame_basis = state_eigenbasis({variant, 0.5, theta, beta});
        ComplexVector phi(4);
        for (int k = 0; k < 4; ++k) phi[static_cast<std::size_t>(k)] = frame_basis.eigenvectors(k, 0);
        for (int j = 0; j < nj; ++j) {
            const ParallelFrame frame{frame_basis, h_of_j[static_cast<std::size_t>(j)], t};
            const ComplexMatrix uv =
                u_of_j[static_cast<std::size_t>(j)] * parallel_corrector(frame);
            const Complex tr_uv = uv.trace();
            const Complex exp_phi = inner(phi, gpnodal::apply(uv, phi));
            for (std::size_t ri = 0; ri < nr; ++ri) {
                const double r = grid.r_values[ri];
                res.trace[ri][static_cast<std::size_t>(i) * nj + j] =
                    0.25 * (1.0 - r) * tr_uv + r * exp_phi;
            }
        }
    });

    int curve_id = 0;
    for (std::size_t ri = 0; ri < nr; ++ri) {
        const double r = grid.r_values[ri];
        const std::vector<Complex>& slice = res.trace[ri];
        const auto re = [&](int i, int j) {
            return slice[static_cast<std::size_t>(i) * nj + j].real();
        };
        const auto im = [&](int i, int j) {
            return slice[static_cast<std::size_t>(i) * nj + j].imag();
        };
        std::vector<detail::Segment> re_segs, im_segs;
        std::vector<std::vector<int>> re_cells, im_cells;
        detail::marching_squares(grid.theta, grid.coupling, re, re_segs, re_cells);
        detail::marching_squares(grid.theta, grid.coupling, im, im_segs, im_cells);

        for (auto& chain : detail::chain_segments(re_segs))
            res.curves.push_back({curve_id++, Polyline::Kind::re_zero, r, std::move(chain)});
        for (auto& chain : detail::chain_segments(im_segs))
            res.curves.push_back({curve_id++, Polyline::Kind::im_zero, r, std::move(chain)});

        const auto eval = [&](double theta, double j_coupling) {
            return nodal_function({variant, r, theta, beta},
                                  {omega, omega, std::max(j_coupling, 0.0) * omega, t},
                                  HamiltonianKind::ising);
        };

        // The J = 0 column is the decoupled limit: the trace is real there,
        // so the whole column lies on the Im = 0 level set and cell-local
        // segment intersection is ill-posed. Treat it as a 1-D problem in
        // theta instead.
        if (grid.coupling.lo == 0.0) {
            for (int i = 0; i + 1 < nt; ++i) {
                const double va = re(i, 0), vb = re(i + 1, 0);
                if (std::abs(va) < 1e-12) {
                    res.nodal_points.push_back({grid.theta.at(i), 0.0, r, std::abs(va), false});
                    continue;
                }
                if (va * vb >= 0.0) continue;
                const double root = detail::bisect_zero(
                    [&](double th) { return eval(th, 0.0).real(); }, grid.theta.at(i),
                    grid.theta.at(i + 1), 1e-10);
                res.nodal_points.push_back({root, 0.0, r, std::abs(eval(root, 0.0)), false});
            }
        }

        for (std::size_t cell = 0; cell < re_cells.size(); ++cell) {
            if (re_cells[cell].empty() || im_cells[cell].empty()) continue;
            for (int rs : re_cells[cell])
                for (int is : im_cells[cell]) {
                    std::array<double, 2> seed;
                    if (!detail::segment_intersection(re_segs[static_cast<std::size_t>(rs)],
                                                      im_segs[static_cast<std::size_t>(is)], seed))
                        continue;
                    // Damped Newton on (Re, Im) with finite-difference Jacobian.
                    double th = seed[0], jc = seed[1];
                    Complex fv = eval(th, jc);
                    bool grazing = false, ok = false;
                    const double fd = 1e-6;
                    for (int it = 0; it < 50; ++it) {
                        if (std::abs(fv) < 1e-10) {
                            ok = true;
                            break;
                        }
                        const Complex fth = (eval(th + fd, jc) - eval(th - fd, jc)) * (0.5 / fd);
                        const Complex fjc = (eval(th, jc + fd) - eval(th, jc - fd)) * (0.5 / fd);
                        const double det =
                            fth.real() * fjc.imag() - fth.imag() * fjc.real();
                        const double scale =
                            std::max({std::abs(fth), std::abs(fjc), 1e-30});
                        if (std::abs(det) < 1e-12 * scale * scale) {
                            grazing = std::abs(fv) < 1e-8;
                            ok = grazing;
                            break;
                        }
                        const double dth = (fv.real() * fjc.imag() - fv.imag() * fjc.real()) / det;
                        const double djc = (fth.real() * fv.imag() - fth.imag() * fv.real()) / det;
                        double lambda = 1.0;
                        bool moved = false;
                        for (int halving = 0; halving < 20; ++halving) {
                            const double cth = th - lambda * dth;
                            const double cjc = std::max(jc - lambda * djc, 0.0);
                            const Complex cf = eval(cth, cjc);
                            if (std::abs(cf) < std::abs(fv)) {
                                th = cth;
                                jc = cjc;
                                fv = cf;
                                moved = true;
                                break;
                            }
                            lambda *= 0.5;
                        }
                        if (!moved) {
                            ok = std::abs(fv) < 1e-8;
                            break;
                        }
                    }
                    if (!ok && std::abs(fv) < 1e-8) ok = true;
                    if (!ok) continue;
                    // A refinement that escaped the scan window (by more
                    // than one cell) belongs to structure outside it.
                    if (th < grid.theta.lo - grid.theta.step() ||
                        th > grid.theta.hi + grid.theta.step() ||
                        jc < grid.coupling.lo - grid.coupling.step() ||
                        jc > grid.coupling.hi + grid.coupling.step())
                        continue;
                    bool dup = false;
                    for (const NodalPoint& p : res.nodal_points)
                        if (p.r == r && std::abs(p.theta - th) < 1e-6 &&
                            std::abs(p.second - jc) < 1e-6) {
                            dup = true;
                            break;
                        }
                    if (!dup)
                        res.nodal_points.push_back({th, jc, r, std::abs(fv), grazing});
                }
        }
    }
    return res;
}

/// For each theta: the supremum r at which some beta solves the nodal
/// condition (free model, omega*t = pi), bisected to 1e-4, paired with the
/// closed-form separability threshold.
inline std::vector<std::array<double, 3>> boundary_scan(StateVariant variant, int n_theta) {
    if (n_theta < 2) throw std::invalid_argument("n_theta must be >= 2");
    const int n_beta = 513;
    const auto nodal_beta_exists = [&](double theta, double r) {
        double prev = analytic_trace({variant, r, theta, 0.0});
        if (std::abs(prev) < 1e-12) return true;
        for (int j = 1; j < n_beta; ++j) {
            const double v = analytic_trace({variant, r, theta, kPi * j / (n_beta - 1)});
            if (std::abs(v) < 1e-12 || v * prev < 0.0) return true;
            prev = v;
        }
        return false;
    };

    std::vector<std::array<double, 3>> rows;
    rows.reserve(static_cast<std::size_t>(n_theta));
    for (int i = 0; i < n_theta; ++i) {
        const double theta = kPi * i / (n_theta - 1);
        double sup;
        if (nodal_beta_exists(theta, 1.0)) {
            sup = 1.0;
        } else {
            // Descend to bracket the top of the existence region, then bisect.
            double hi = 1.0, lo = -1.0;
            for (int k = 1; k <= 64; ++k) {
                const double r = 1.0 - static_cast<double>(k) / 64.0 + 1e-12;
                if (nodal_beta_exists(theta, r)) {
                    lo = r;
                    break;
                }
                hi = r;
            }
            if (lo < 0.0) {
                sup = 0.0;  // no nodal beta for any sampled r
            } else {
                while (hi - lo > 1e-4) {
                    const double mid = 0.5 * (lo + hi);
                    (nodal_beta_exists(theta, mid) ? lo : hi) = mid;
                }
                sup = 0.5 * (lo + hi);
            }
        }
        rows.push_back({theta, sup, separability_boundary(theta)});
    }
    return rows;
}

}  // namespace gpnodal
