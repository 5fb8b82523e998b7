#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "seqdyn/nfield/neural_field.hpp"

namespace seqdyn::nfield {

struct AxialSpectrum {
    std::vector<double> eigenvalues; // real parts, descending
    double max_imag = 0.0;
    int n_positive = 0;
    int n_negative = 0;
};

/// Jacobian Df(a_i e_i) = -I + Sigma W.
inline Mat axial_jacobian(const NeuralFieldSystem& sys, int i)
{
    require(i >= 0 && i < sys.dim(), "axial_jacobian: equilibrium index out of range");
    return sys.jacobian(sys.equilibria().col(i));
}

inline AxialSpectrum axial_spectrum(const NeuralFieldSystem& sys, int i)
{
    require(sys.axial(), "axial_spectrum: requires an axial system");
    Eigen::EigenSolver<Mat> es(axial_jacobian(sys, i), false);
    if (es.info() != Eigen::Success)
        throw NumericError("axial_spectrum: eigensolver did not converge");
    AxialSpectrum out;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const auto ev = es.eigenvalues()[k];
        out.eigenvalues.push_back(ev.real());
        out.max_imag = std::max(out.max_imag, std::abs(ev.imag()));
        if (ev.real() > 0.0)
            ++out.n_positive;
        else if (ev.real() < 0.0)
            ++out.n_negative;
    }
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), std::greater<>());
    return out;
}

/**
 * Diagonal-plus-rank-one data of Df(a_i e_i) + I = Sigma A - (Sigma b) u^T:
 * poles lambda_j (diagonal of Sigma A) and weights alpha_j = b_j sigma'(.) / a_j of
 *
 *     phi(mu) = 1 + sum_j alpha_j / (mu - lambda_j).
 */
struct SecularData {
    Vec poles;
    Vec weights;
};

inline SecularData secular_data(const NeuralFieldSystem& sys, int i)
{
    require(sys.axial(), "secular_data: requires an axial system");
    require(i >= 0 && i < sys.dim(), "secular_data: equilibrium index out of range");
    const Vec a = sys.amplitudes();
    const Vec& b = sys.b();
    const Activation& sg = sys.sigma();
    SecularData d{Vec(a.size()), Vec(a.size())};
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        const double sj = sg.inverse(a[j]);
        const double slope = sg.derivative(j == i ? sj : 0.0);
        d.poles[j] = sj * slope / a[j];
        d.weights[j] = b[j] * slope / a[j];
    }
    return d;
}

inline double secular_phi(const SecularData& d, double mu)
{
    double phi = 1.0;
    for (Eigen::Index j = 0; j < d.poles.size(); ++j) {
        const double gap = mu - d.poles[j];
        if (gap == 0.0)
            throw PreconditionError("secular_phi: evaluation at a pole");
        phi += d.weights[j] / gap;
    }
    return phi;
}

inline double secular_phi(const NeuralFieldSystem& sys, int i, double mu)
{
    return secular_phi(secular_data(sys, i), mu);
}

/**
 * Spectrum of Df(a_i e_i) from the secular equation: one root of phi below the
 * smallest distinct pole, one between each pair of consecutive distinct poles
 * (bisection), plus pole - 1 for each repeated pole (multiplicity - 1).
 * Returned descending.
 */
inline std::vector<double> secular_spectrum(const NeuralFieldSystem& sys, int i)
{
    const SecularData d = secular_data(sys, i);
    std::vector<std::pair<double, double>> sorted; // (pole, weight)
    for (Eigen::Index j = 0; j < d.poles.size(); ++j)
        sorted.emplace_back(d.poles[j], d.weights[j]);
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> poles, weights;
    std::vector<int> mult;
    for (const auto& [p, w] : sorted) {
        if (!poles.empty() && std::abs(p - poles.back()) <= 1e-12 * std::max(1.0, std::abs(p))) {
            weights.back() += w;
            ++mult.back();
        } else {
            poles.push_back(p);
            weights.push_back(w);
            mult.push_back(1);
        }
    }
    const SecularData merged{Eigen::Map<Vec>(poles.data(), static_cast<Eigen::Index>(poles.size())),
                             Eigen::Map<Vec>(weights.data(), static_cast<Eigen::Index>(weights.size()))};

    // on each bracket phi > 0 at the left end and phi < 0 at the right end
    auto bisect = [&](double lo, double hi) {
        for (int it = 0; it < 300; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            (secular_phi(merged, mid) > 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    std::vector<double> eig;
    const double total_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
    // phi(mu) > 0 for mu < pole_min - total_weight
    eig.push_back(bisect(poles.front() - total_weight - 1.0, poles.front()) - 1.0);
    for (std::size_t l = 0; l + 1 < poles.size(); ++l)
        eig.push_back(bisect(poles[l], poles[l + 1]) - 1.0);
    for (std::size_t l = 0; l < poles.size(); ++l)
        for (int k = 1; k < mult[l]; ++k)
            eig.push_back(poles[l] - 1.0);
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

/// det(Df(a_i e_i) - lambda I), computed directly.
inline double characteristic_direct(const NeuralFieldSystem& sys, int i, double lambda)
{
    const Mat j = axial_jacobian(sys, i);
    return (j - lambda * Mat::Identity(j.rows(), j.cols())).partialPivLu().determinant();
}

/// phi(lambda + 1) * det(Sigma A - (lambda + 1) I), the matrix-determinant-lemma factorization.
inline double characteristic_secular(const NeuralFieldSystem& sys, int i, double lambda)
{
    const SecularData d = secular_data(sys, i);
    const double mu = lambda + 1.0;
    double det = 1.0;
    for (Eigen::Index j = 0; j < d.poles.size(); ++j)
        det *= d.poles[j] - mu;
    return secular_phi(d, mu) * det;
}

} // namespace seqdyn::nfield
