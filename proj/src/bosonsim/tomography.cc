// Copyright 2026 The BosonSim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bosonsim/tomography.h"

#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bosonsim/errors.h"
#include "bosonsim/rng.h"

namespace bosonsim {

namespace {

using Eigen::Index;

Index idx(size_t k) {
    return static_cast<Index>(k);
}

double wrap_phase(double x) {
    double y = std::fmod(x + std::numbers::pi, 2 * std::numbers::pi);
    if (y <= 0) {
        y += 2 * std::numbers::pi;
    }
    return y - std::numbers::pi;
}

void check_record(const VisibilityRecord &r, size_t m) {
    if (r.i1 >= m || r.i2 >= m || r.j1 >= m || r.j2 >= m) {
        throw std::invalid_argument("visibility record mode index out of range");
    }
    if (r.i1 == r.i2 || r.j1 == r.j2) {
        throw std::invalid_argument("visibility record needs distinct input modes and distinct output modes");
    }
    if (!std::isfinite(r.visibility) || !std::isfinite(r.variance)) {
        throw std::invalid_argument("visibility record has a non-finite value");
    }
}

// Visibility envelope 2abcd / ((ab)^2 + (cd)^2) with a = tau(i1,j1), b = tau(i2,j2),
// c = tau(i1,j2), d = tau(i2,j1). Empty when P_dist vanishes. V = -envelope * cos(combination):
// a real positive matrix interferes constructively and gives a peak (V < 0).
std::optional<double> envelope(const Eigen::MatrixXd &tau, const VisibilityRecord &r) {
    double direct = tau(idx(r.i1), idx(r.j1)) * tau(idx(r.i2), idx(r.j2));
    double crossed = tau(idx(r.i1), idx(r.j2)) * tau(idx(r.i2), idx(r.j1));
    double denom = direct * direct + crossed * crossed;
    if (!(denom > 0)) {
        return std::nullopt;
    }
    return 2 * direct * crossed / denom;
}

double combination(const Eigen::MatrixXd &phases, const VisibilityRecord &r) {
    return phases(idx(r.i1), idx(r.j1)) + phases(idx(r.i2), idx(r.j2)) - phases(idx(r.i1), idx(r.j2)) -
           phases(idx(r.i2), idx(r.j1));
}

}  // namespace

void OnePhotonData::validate() const {
    if (frequency.rows() != frequency.cols() || frequency.rows() == 0) {
        throw std::invalid_argument("one-photon table must be square and non-empty");
    }
    if (variance.rows() != frequency.rows() || variance.cols() != frequency.cols()) {
        throw std::invalid_argument("one-photon variance table shape mismatch");
    }
    if (!frequency.allFinite() || frequency.minCoeff() < 0 || !variance.allFinite() || variance.minCoeff() < 0) {
        throw std::invalid_argument("one-photon frequencies and variances must be finite and non-negative");
    }
}

OnePhotonData simulate_one_photon(const TransferMatrix &lambda) {
    Eigen::MatrixXd f = lambda.entries().cwiseAbs2();
    return OnePhotonData{f, Eigen::MatrixXd::Zero(f.rows(), f.cols())};
}

OnePhotonData simulate_one_photon(const TransferMatrix &lambda, uint64_t shots, uint64_t seed) {
    if (shots == 0) {
        throw std::invalid_argument("one-photon simulation needs at least one shot");
    }
    const Index m = idx(lambda.size());
    Eigen::MatrixXd p = lambda.entries().cwiseAbs2();
    OnePhotonData data{Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Zero(m, m)};
    for (Index i = 0; i < m; ++i) {
        // Categories 0..m-1 are outputs; category m is "lost".
        std::vector<double> cdf(static_cast<size_t>(m) + 1);
        double acc = 0;
        for (Index j = 0; j < m; ++j) {
            acc += p(i, j);
            cdf[static_cast<size_t>(j)] = acc;
        }
        cdf.back() = std::max(acc, 1.0);
        std::vector<uint64_t> counts(cdf.size(), 0);
        CounterRng rng(seed, static_cast<uint64_t>(i));
        for (uint64_t s = 0; s < shots; ++s) {
            double u = rng.uniform() * cdf.back();
            size_t k = static_cast<size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            counts[std::min(k, cdf.size() - 1)] += 1;
        }
        for (Index j = 0; j < m; ++j) {
            double f = static_cast<double>(counts[static_cast<size_t>(j)]) / static_cast<double>(shots);
            data.frequency(i, j) = f;
            data.variance(i, j) = f * (1 - f) / static_cast<double>(shots);
        }
    }
    return data;
}

TwoPhotonProbabilities simulate_two_photon(const TransferMatrix &lambda, size_t i1, size_t i2, size_t j1, size_t j2) {
    check_record(VisibilityRecord{i1, i2, j1, j2, 0, 0}, lambda.size());
    Complex direct = lambda(i1, j1) * lambda(i2, j2);
    Complex crossed = lambda(i2, j1) * lambda(i1, j2);
    TwoPhotonProbabilities out;
    out.indistinguishable = std::norm(direct + crossed);
    out.distinguishable = std::norm(direct) + std::norm(crossed);
    if (!(out.distinguishable > 0)) {
        throw NumericalError(
            "visibility undefined: distinguishable coincidence probability is zero for inputs (" + std::to_string(i1) +
            "," + std::to_string(i2) + ") outputs (" + std::to_string(j1) + "," + std::to_string(j2) + ")");
    }
    out.visibility = (out.distinguishable - out.indistinguishable) / out.distinguishable;
    return out;
}

TwoPhotonData simulate_visibilities(const TransferMatrix &lambda, double min_distinguishable) {
    TwoPhotonData data;
    const size_t m = lambda.size();
    for (size_t i1 = 0; i1 < m; ++i1) {
        for (size_t i2 = i1 + 1; i2 < m; ++i2) {
            for (size_t j1 = 0; j1 < m; ++j1) {
                for (size_t j2 = j1 + 1; j2 < m; ++j2) {
                    double pd = std::norm(lambda(i1, j1) * lambda(i2, j2)) + std::norm(lambda(i2, j1) * lambda(i1, j2));
                    if (pd <= min_distinguishable) {
                        continue;
                    }
                    data.push_back({i1, i2, j1, j2, simulate_two_photon(lambda, i1, i2, j1, j2).visibility, 0});
                }
            }
        }
    }
    return data;
}

Magnitudes recover_magnitudes(const OnePhotonData &data) {
    data.validate();
    const Index m = data.frequency.rows();
    Magnitudes out{Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Zero(m, m)};
    for (Index i = 0; i < m; ++i) {
        Index jmax = 0;
        double fmax = data.frequency.row(i).maxCoeff(&jmax);
        if (!(fmax > 0)) {
            throw std::invalid_argument("input " + std::to_string(i) + " has no detections in any output");
        }
        double var_max = data.variance(i, jmax);
        for (Index j = 0; j < m; ++j) {
            double f = data.frequency(i, j);
            if (j == jmax) {
                out.tau(i, j) = 1.0;
                continue;
            }
            double t = std::sqrt(f / fmax);
            out.tau(i, j) = t;
            if (f > 0) {
                double d_f = t / (2 * f);
                double d_max = t / (2 * fmax);
                out.variance(i, j) = d_f * d_f * data.variance(i, j) + d_max * d_max * var_max;
            } else {
                // sqrt is not differentiable at 0; report the spread of tau^2 instead.
                out.variance(i, j) = std::sqrt(data.variance(i, j)) / fmax;
            }
        }
    }
    return out;
}

PhaseModel::PhaseModel(Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask) : mask_(std::move(mask)) {
    if (mask_.rows() != mask_.cols()) {
        throw std::invalid_argument("phase mask must be square");
    }
    const size_t m = static_cast<size_t>(mask_.rows());
    // Nodes 0..m-1 are inputs, m..2m-1 are outputs.
    std::vector<bool> visited(2 * m, false);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> tree = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(mask_.rows(), mask_.cols(), false);
    for (size_t root = 0; root < 2 * m; ++root) {
        if (visited[root]) {
            continue;
        }
        visited[root] = true;
        std::deque<size_t> queue{root};
        while (!queue.empty()) {
            size_t node = queue.front();
            queue.pop_front();
            for (size_t other = 0; other < m; ++other) {
                size_t i = node < m ? node : other;
                size_t j = node < m ? other : node - m;
                size_t neighbour = node < m ? m + other : other;
                if (!mask_(idx(i), idx(j)) || visited[neighbour]) {
                    continue;
                }
                visited[neighbour] = true;
                tree(idx(i), idx(j)) = true;
                queue.push_back(neighbour);
            }
        }
    }
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (!mask_(idx(i), idx(j))) {
                continue;
            }
            (tree(idx(i), idx(j)) ? fixed_ : free_).emplace_back(i, j);
        }
    }
}

PhaseModel PhaseModel::full(size_t m) {
    return PhaseModel(Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(idx(m), idx(m), true));
}

PhaseModel PhaseModel::from_magnitudes(const Eigen::MatrixXd &tau, double threshold) {
    return PhaseModel((tau.array() > threshold).matrix());
}

double model_visibility(const Eigen::MatrixXd &tau, const Eigen::MatrixXd &phases, const VisibilityRecord &record) {
    check_record(record, static_cast<size_t>(tau.rows()));
    auto env = envelope(tau, record);
    if (!env) {
        throw NumericalError("visibility undefined for a record whose distinguishable probability is zero");
    }
    return -*env * std::cos(combination(phases, record));
}

PhaseFit recover_phases(
    const Eigen::MatrixXd &tau, const TwoPhotonData &data, const PhaseModel &model, const PhaseFitOptions &options) {
    const size_t m = model.size();
    if (static_cast<size_t>(tau.rows()) != m || static_cast<size_t>(tau.cols()) != m) {
        throw std::invalid_argument("magnitude matrix and phase model sizes differ");
    }
    if (options.starts == 0) {
        throw std::invalid_argument("phase fit needs at least one start");
    }

    // Column of each free phase, or -1 for fixed / unmasked entries.
    Eigen::MatrixXi column = Eigen::MatrixXi::Constant(idx(m), idx(m), -1);
    const auto &free = model.free();
    for (size_t f = 0; f < free.size(); ++f) {
        column(idx(free[f].first), idx(free[f].second)) = static_cast<int>(f);
    }

    struct Term {
        double sqrt_weight;
        double measured;
        double envelope;
        std::array<std::pair<int, double>, 4> coeffs;
        VisibilityRecord record;
    };
    std::vector<Term> terms;
    for (const auto &r : data) {
        check_record(r, m);
        auto env = envelope(tau, r);
        if (!env) {
            continue;
        }
        double w = r.variance > 0 ? 1.0 / r.variance : 1.0;
        terms.push_back(Term{
            std::sqrt(w), r.visibility, *env,
            {{{column(idx(r.i1), idx(r.j1)), 1.0},
              {column(idx(r.i2), idx(r.j2)), 1.0},
              {column(idx(r.i1), idx(r.j2)), -1.0},
              {column(idx(r.i2), idx(r.j1)), -1.0}}},
            r});
    }

    const Index n_free = idx(free.size());
    Eigen::MatrixXd constraints = Eigen::MatrixXd::Zero(idx(terms.size()), n_free);
    for (size_t k = 0; k < terms.size(); ++k) {
        if (terms[k].envelope == 0) {
            continue;
        }
        for (const auto &[col, coef] : terms[k].coeffs) {
            if (col >= 0) {
                constraints(idx(k), col) += coef;
            }
        }
    }
    size_t rank = n_free == 0 ? 0 : static_cast<size_t>(Eigen::FullPivLU<Eigen::MatrixXd>(constraints).rank());
    if (rank < free.size()) {
        throw UnderdeterminedError(
            "phase system is under-determined: " + std::to_string(free.size()) + " free phases but only " +
                std::to_string(rank) + " independent constraints (" + std::to_string(free.size() - rank) +
                " missing degrees of freedom)",
            rank, free.size());
    }

    auto phase_matrix = [&](const Eigen::VectorXd &x) {
        Eigen::MatrixXd ph = Eigen::MatrixXd::Zero(idx(m), idx(m));
        for (size_t f = 0; f < free.size(); ++f) {
            ph(idx(free[f].first), idx(free[f].second)) = x(idx(f));
        }
        return ph;
    };
    auto residual = [&](const Eigen::VectorXd &x) {
        Eigen::MatrixXd ph = phase_matrix(x);
        Eigen::VectorXd r(idx(terms.size()));
        for (size_t k = 0; k < terms.size(); ++k) {
            const auto &t = terms[k];
            r(idx(k)) = t.sqrt_weight * (t.measured + t.envelope * std::cos(combination(ph, t.record)));
        }
        return r;
    };
    auto jacobian = [&](const Eigen::VectorXd &x) {
        Eigen::MatrixXd ph = phase_matrix(x);
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(idx(terms.size()), n_free);
        for (size_t k = 0; k < terms.size(); ++k) {
            const auto &t = terms[k];
            double g = -t.sqrt_weight * t.envelope * std::sin(combination(ph, t.record));
            for (const auto &[col, coef] : t.coeffs) {
                if (col >= 0) {
                    jac(idx(k), col) += g * coef;
                }
            }
        }
        return jac;
    };

    PhaseFit best;
    best.residual = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    LevenbergMarquardtOptions solver = options.solver;
    solver.cost_target = std::max(solver.cost_target, 0.5 * options.early_exit);
    size_t used = 0;
    for (size_t s = 0; s < options.starts; ++s) {
        ++used;
        CounterRng rng(options.seed, s);
        Eigen::VectorXd x0(n_free);
        for (Index f = 0; f < n_free; ++f) {
            x0(f) = std::numbers::pi * (2 * rng.uniform() - 1);
        }
        auto fit = levenberg_marquardt(residual, x0, solver, jacobian);
        any_converged = any_converged || fit.converged;
        double value = 2 * fit.value;
        if (value < best.residual) {
            best.residual = value;
            best.phases = phase_matrix(fit.x.unaryExpr(&wrap_phase));
        }
        if (best.residual <= options.early_exit) {
            break;
        }
    }
    if (n_free == 0) {
        best.phases = Eigen::MatrixXd::Zero(idx(m), idx(m));
        best.residual = residual(Eigen::VectorXd(0)).squaredNorm();
        any_converged = true;
    }
    if (!any_converged) {
        throw ConvergenceError("phase fit did not converge from any start", best.residual);
    }
    best.rank = rank;
    best.free_phases = free.size();
    best.starts_used = used;
    return best;
}

TransferMatrix assemble_matrix(const Eigen::MatrixXd &tau, const Eigen::MatrixXd &phases) {
    if (tau.rows() != phases.rows() || tau.cols() != phases.cols()) {
        throw std::invalid_argument("magnitude and phase matrices differ in shape");
    }
    ComplexMatrix out(tau.rows(), tau.cols());
    for (Index i = 0; i < tau.rows(); ++i) {
        for (Index j = 0; j < tau.cols(); ++j) {
            out(i, j) = std::polar(tau(i, j), phases(i, j));
        }
    }
    return TransferMatrix(std::move(out));
}

std::vector<TransferMatrix> resample_lambda(
    const Eigen::MatrixXd &tau, const Eigen::MatrixXd &phases, const Eigen::MatrixXd &tau_variance,
    const Eigen::MatrixXd &phase_variance, size_t n_draws, uint64_t seed) {
    if (n_draws < 1) {
        throw std::invalid_argument("resample_lambda needs at least one draw");
    }
    for (const auto *m : {&phases, &tau_variance, &phase_variance}) {
        if (m->rows() != tau.rows() || m->cols() != tau.cols()) {
            throw std::invalid_argument("resample_lambda inputs differ in shape");
        }
    }
    if (tau_variance.minCoeff() < 0 || phase_variance.minCoeff() < 0) {
        throw std::invalid_argument("variances must be non-negative");
    }
    Eigen::MatrixXd tau_sd = tau_variance.cwiseSqrt();
    Eigen::MatrixXd phase_sd = phase_variance.cwiseSqrt();
    std::vector<TransferMatrix> out;
    out.reserve(n_draws);
    for (size_t k = 0; k < n_draws; ++k) {
        CounterRng rng(seed, k);
        Eigen::MatrixXd t(tau.rows(), tau.cols());
        Eigen::MatrixXd p(tau.rows(), tau.cols());
        for (Index i = 0; i < tau.rows(); ++i) {
            for (Index j = 0; j < tau.cols(); ++j) {
                double zt = rng.normal();
                double zp = rng.normal();
                t(i, j) = std::max(0.0, tau(i, j) + tau_sd(i, j) * zt);
                p(i, j) = phases(i, j) + phase_sd(i, j) * zp;
            }
        }
        out.push_back(assemble_matrix(t, p));
    }
    return out;
}

std::vector<double> distribution_spread(
    const std::vector<TransferMatrix> &ensemble, const ModeOccupation &input, const std::vector<ModeOccupation> &outcomes) {
    if (ensemble.empty()) {
        throw std::invalid_argument("distribution_spread needs a non-empty ensemble");
    }
    std::vector<double> mean(outcomes.size(), 0.0), sq(outcomes.size(), 0.0);
    for (const auto &lambda : ensemble) {
        auto d = distribution(lambda, input, outcomes, true);
        for (size_t k = 0; k < outcomes.size(); ++k) {
            mean[k] += d.probs()[k];
            sq[k] += d.probs()[k] * d.probs()[k];
        }
    }
    double n = static_cast<double>(ensemble.size());
    std::vector<double> sd(outcomes.size(), 0.0);
    if (ensemble.size() > 1) {
        for (size_t k = 0; k < outcomes.size(); ++k) {
            double mu = mean[k] / n;
            sd[k] = std::sqrt(std::max(0.0, (sq[k] - n * mu * mu) / (n - 1)));
        }
    }
    return sd;
}

}  // namespace bosonsim
