#pragma once

#include <cstdio>
#include <string>

#include "gpnodal/scanner.hpp"

namespace gpnodal {

/// Fixed 17-significant-digit scientific notation so identical runs emit
/// byte-identical files.
inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

/// Free scans: `theta,beta,r,re_trace,im_trace,abs_trace`, rows ordered by
/// (r slice, theta, beta). LF line endings.
inline std::string free_grid_csv(const NodalScanResult& res) {
    std::string out = "theta,beta,r,re_trace,im_trace,abs_trace\n";
    const int nt = res.grid.theta.n, nb = res.grid.beta.n;
    for (std::size_t ri = 0; ri < res.grid.r_values.size(); ++ri) {
        const std::string r = csv_double(res.grid.r_values[ri]);
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < nb; ++j) {
                const Complex z = res.trace[ri][static_cast<std::size_t>(i) * nb + j];
                out += csv_double(res.grid.theta.at(i));
                out += ',';
                out += csv_double(res.grid.beta.at(j));
                out += ',';
                out += r;
                out += ',';
                out += csv_double(z.real());
                out += ',';
                out += csv_double(z.imag());
                out += ',';
                out += csv_double(std::abs(z));
                out += '\n';
            }
    }
    return out;
}

/// Ising scans: `theta,J,r,re_trace,im_trace`, rows ordered by (r slice,
/// theta, J).
inline std::string ising_grid_csv(const NodalScanResult& res) {
    std::string out = "theta,J,r,re_trace,im_trace\n";
    const int nt = res.grid.theta.n, nj = res.grid.coupling.n;
    for (std::size_t ri = 0; ri < res.grid.r_values.size(); ++ri) {
        const std::string r = csv_double(res.grid.r_values[ri]);
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < nj; ++j) {
                const Complex z = res.trace[ri][static_cast<std::size_t>(i) * nj + j];
                out += csv_double(res.grid.theta.at(i));
                out += ',';
                out += csv_double(res.grid.coupling.at(j));
                out += ',';
                out += r;
                out += ',';
                out += csv_double(z.real());
                out += ',';
                out += csv_double(z.imag());
                out += '\n';
            }
    }
    return out;
}

/// Refined nodal points. The second column is beta for free scans and J for
/// Ising scans.
inline std::string nodal_points_csv(const NodalScanResult& res) {
    std::string out = res.ising ? "theta,J,r,residual\n" : "theta,beta,r,residual\n";
    for (const NodalPoint& p : res.nodal_points) {
        out += csv_double(p.theta);
        out += ',';
        out += csv_double(p.second);
        out += ',';
        out += csv_double(p.r);
        out += ',';
        out += csv_double(p.residual);
        out += '\n';
    }
    return out;
}

/// Level-set polylines: `curve_id,kind,theta,J`, kind in {re_zero, im_zero}.
inline std::string curves_csv(const NodalScanResult& res) {
    std::string out = "curve_id,kind,theta,J\n";
    for (const Polyline& c : res.curves) {
        const char* kind = c.kind == Polyline::Kind::re_zero ? "re_zero" : "im_zero";
        for (const std::array<double, 2>& p : c.points) {
            out += std::to_string(c.id);
            out += ',';
            out += kind;
            out += ',';
            out += csv_double(p[0]);
            out += ',';
            out += csv_double(p[1]);
            out += '\n';
        }
    }
    return out;
}

/// Boundary scan: `theta,r_nodal_max,r_separable`.
inline std::string boundary_csv(const std::vector<std::array<double, 3>>& rows) {
    std::string out = "theta,r_nodal_max,r_separable\n";
    for (const std::array<double, 3>& row : rows) {
        out += csv_double(row[0]);
        out += ',';
        out += csv_double(row[1]);
        out += ',';
        out += csv_double(row[2]);
        out += '\n';
    }
    return out;
}

}  // namespace gpnodal
