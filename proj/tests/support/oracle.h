#pragma once

#include "wgqed/model.h"

#include <Eigen/Dense>

#include <vector>

// Brute-force reference for the single-excitation dynamics, independent of the
// Laguerre closed forms and of the Fourier engine:
//   d phi_n/dt = -gamma phi_n - i sqrt(k_n) chi_{n-1},  chi_n = chi_{n-1} - i sqrt(k_n) phi_n,
// with k_n = 2 beta_n gamma and chi_0 the input field. Integrated exactly by
// matrix exponentials.
namespace oracle {

using wgqed::cplx;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

class ChainOde {
public:
    explicit ChainOde(const wgqed::model::EnsembleParams &params);

    std::size_t size() const { return static_cast<std::size_t>(a_.rows()); }

    // Free decay over time t.
    Vec free(const Vec &phi0, double t) const;

    // Drive chi_0(s) = amplitude e^{i detuning s} for s in [s0, s0 + t], starting from phi0.
    Vec driven(const Vec &phi0, cplx amplitude, double detuning, double s0, double t) const;

    // Steady state under a constant resonant drive.
    Vec steady(cplx amplitude) const;

    // chi_N for atom amplitudes phi and input field u.
    cplx output(const Vec &phi, cplx u) const;

    const Mat &matrix() const { return a_; }

private:
    Mat a_;
    Vec b_;
};

Vec to_vec(const std::vector<double> &v);
Vec to_vec(const std::vector<cplx> &v);

double max_abs(const Vec &v);

} // namespace oracle
