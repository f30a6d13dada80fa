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

#include "bosonsim/lossy.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "bosonsim/errors.h"
#include "bosonsim/optimize.h"

namespace bosonsim {

namespace {

using Eigen::Index;

Index idx(size_t k) {
    return static_cast<Index>(k);
}

// result <- result * embed(element)
void apply_element(ComplexMatrix &result, const BeamSplitter &e) {
    ComplexMatrix bs = beam_splitter_matrix(e);
    Eigen::VectorXcd col_a = result.col(idx(e.a));
    Eigen::VectorXcd col_b = result.col(idx(e.b));
    result.col(idx(e.a)) = col_a * bs(0, 0) + col_b * bs(1, 0);
    result.col(idx(e.b)) = col_a * bs(0, 1) + col_b * bs(1, 1);
}

ComplexMatrix restrict_to(const ComplexMatrix &full, const std::vector<size_t> &modes) {
    ComplexMatrix out(idx(modes.size()), idx(modes.size()));
    for (size_t r = 0; r < modes.size(); ++r) {
        for (size_t c = 0; c < modes.size(); ++c) {
            out(idx(r), idx(c)) = full(idx(modes[r]), idx(modes[c]));
        }
    }
    return out;
}

void check_budget(const LossBudget &losses, size_t accessible) {
    for (const auto *group : {&losses.source, &losses.circuit, &losses.detector}) {
        if (group->size() != accessible) {
            throw std::invalid_argument("loss budget groups need one entry per accessible mode");
        }
        for (double l : *group) {
            if (!(l >= 0 && l <= 1)) {
                throw std::invalid_argument("loss fractions must lie in [0, 1]");
            }
        }
    }
}

LossBudget relative_of(const LossBudget &losses, double &source_scale, double &circuit_scale, double &detector_scale) {
    auto scale_group = [](const std::vector<double> &g, double &scale) {
        scale = g.empty() ? 0 : *std::max_element(g.begin(), g.end());
        std::vector<double> rel(g.size(), 0.0);
        if (scale > 0) {
            for (size_t k = 0; k < g.size(); ++k) {
                rel[k] = g[k] / scale;
            }
        }
        return rel;
    };
    LossBudget rel;
    rel.source = scale_group(losses.source, source_scale);
    rel.circuit = scale_group(losses.circuit, circuit_scale);
    rel.detector = scale_group(losses.detector, detector_scale);
    return rel;
}

}  // namespace

void CircuitTopology::validate() const {
    if (modes == 0) {
        throw std::invalid_argument("topology has no modes");
    }
    std::set<size_t> seen;
    for (size_t m : accessible) {
        if (m >= modes || !seen.insert(m).second) {
            throw std::invalid_argument("accessible mode " + std::to_string(m) + " is out of range or repeated");
        }
    }
    if (accessible.empty()) {
        throw std::invalid_argument("topology has no accessible modes");
    }
    for (size_t k = 0; k < elements.size(); ++k) {
        const auto &e = elements[k];
        if (e.a >= modes || e.b >= modes || e.a == e.b) {
            throw std::invalid_argument("element " + std::to_string(k) + " has invalid mode indices");
        }
        if (!(e.reflectivity >= 0 && e.reflectivity <= 1) || !std::isfinite(e.phase)) {
            throw std::invalid_argument("element " + std::to_string(k) + " has reflectivity outside [0, 1]");
        }
    }
}

ComplexMatrix beam_splitter_matrix(const BeamSplitter &e) {
    double c = std::sqrt(e.reflectivity);
    double s = std::sqrt(1 - e.reflectivity);
    Complex phase = std::polar(1.0, e.phase);
    Complex i(0, 1);
    ComplexMatrix m(2, 2);
    m << phase * c, phase * i * s, i * s, c;
    return m;
}

ComplexMatrix full_unitary(const CircuitTopology &topo) {
    topo.validate();
    ComplexMatrix u = ComplexMatrix::Identity(idx(topo.modes), idx(topo.modes));
    for (const auto &e : topo.elements) {
        apply_element(u, e);
    }
    return u;
}

TransferMatrix topology_to_matrix(const CircuitTopology &topo) {
    return TransferMatrix(restrict_to(full_unitary(topo), topo.accessible));
}

TransferMatrix DilationUnitary::system_block() const {
    return TransferMatrix(unitary.entries().topLeftCorner(idx(accessible), idx(accessible)));
}

DilationUnitary dilate(const TransferMatrix &lambda) {
    const Index m = idx(lambda.size());
    Eigen::JacobiSVD<ComplexMatrix> svd(lambda.entries(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd s = svd.singularValues();
    if (m > 0 && s(0) > 1 + 1e-10) {
        throw std::invalid_argument(
            "matrix has singular value " + std::to_string(s(0)) + " > 1 and is not a physical lossy channel");
    }
    // Singular values within rounding of 1 are treated as exactly lossless; otherwise the
    // square root would turn 1e-16 of rounding into 1e-8 of spurious coupling.
    Eigen::VectorXd clipped = s.cwiseMin(1.0);
    Eigen::VectorXd c(m);
    for (Index k = 0; k < m; ++k) {
        double gap = 1.0 - clipped(k) * clipped(k);
        if (gap <= 1e-12) {
            clipped(k) = 1.0;
            c(k) = 0.0;
        } else {
            c(k) = std::sqrt(gap);
        }
    }
    const ComplexMatrix &w = svd.matrixU();
    const ComplexMatrix &v = svd.matrixV();

    ComplexMatrix u(2 * m, 2 * m);
    u.topLeftCorner(m, m) = lambda.entries();
    u.topRightCorner(m, m) = -(w * c.cast<Complex>().asDiagonal());
    u.bottomLeftCorner(m, m) = c.cast<Complex>().asDiagonal() * v.adjoint();
    u.bottomRightCorner(m, m) = clipped.cast<Complex>().asDiagonal();
    return DilationUnitary{TransferMatrix(std::move(u)), lambda.size()};
}

DilationUnitary topology_dilation(const CircuitTopology &topo) {
    ComplexMatrix full = full_unitary(topo);
    std::vector<size_t> order = topo.accessible;
    std::set<size_t> acc(topo.accessible.begin(), topo.accessible.end());
    for (size_t k = 0; k < topo.modes; ++k) {
        if (!acc.count(k)) {
            order.push_back(k);
        }
    }
    return DilationUnitary{TransferMatrix(restrict_to(full, order)), topo.accessible.size()};
}

OutcomeDistribution full_output_distribution(const DilationUnitary &circuit, const ModeOccupation &input) {
    const size_t total = circuit.total_modes();
    ModeOccupation full_input = input;
    if (input.num_modes() == circuit.accessible) {
        full_input = input.resized(total);
    } else if (input.num_modes() != total) {
        throw std::invalid_argument("input occupation does not match the circuit's mode count");
    }
    for (size_t k = circuit.accessible; k < total; ++k) {
        if (full_input[k] != 0) {
            throw std::invalid_argument("photons may only be injected into accessible modes");
        }
    }
    auto outcomes = enumerate_outcomes(total, full_input.total(), false);
    return distribution(circuit.unitary, full_input, outcomes, false);
}

OutcomeDistribution postselected_distribution(
    const DilationUnitary &circuit, const ModeOccupation &input, size_t photons) {
    if (input.total() != photons) {
        throw std::invalid_argument("input holds " + std::to_string(input.total()) + " photons, expected " + std::to_string(photons));
    }
    auto full = full_output_distribution(circuit, input);
    const size_t m = circuit.accessible;
    auto outcomes = enumerate_outcomes(m, photons, false);
    std::vector<double> probs(outcomes.size(), 0.0);
    for (size_t k = 0; k < full.size(); ++k) {
        const auto &s = full.outcomes()[k];
        if (s.head(m).total() == photons) {
            // Outcome lists are both in descending lexicographic order, but look up to stay order-agnostic.
            auto it = std::lower_bound(outcomes.begin(), outcomes.end(), s.head(m), std::greater<>());
            probs[static_cast<size_t>(it - outcomes.begin())] += full.probs()[k];
        }
    }
    DistributionMetadata meta{input.head(m), "", "no photon lost", OutcomeKind::kOccupation};
    OutcomeDistribution dist(std::move(outcomes), std::move(probs), std::move(meta));
    dist.renormalize();
    return dist;
}

double survival_probability(const TransferMatrix &lambda, const ModeOccupation &input) {
    if (!lambda.is_subunitary()) {
        throw std::invalid_argument("survival probability needs a sub-unitary matrix");
    }
    auto outcomes = enumerate_outcomes(lambda.size(), input.total(), false);
    return distribution(lambda, input, outcomes, false).total();
}

LossBudget LossBudget::zero(size_t accessible) {
    return LossBudget{
        std::vector<double>(accessible, 0.0), std::vector<double>(accessible, 0.0), std::vector<double>(accessible, 0.0)};
}

std::vector<double> LossBudget::flatten() const {
    std::vector<double> out;
    out.reserve(source.size() * 3);
    out.insert(out.end(), source.begin(), source.end());
    out.insert(out.end(), circuit.begin(), circuit.end());
    out.insert(out.end(), detector.begin(), detector.end());
    return out;
}

LossBudget LossBudget::unflatten(const std::vector<double> &values, size_t accessible) {
    if (values.size() != 3 * accessible) {
        throw std::invalid_argument("flattened loss budget has the wrong length");
    }
    auto at = [&](size_t g) {
        return std::vector<double>(
            values.begin() + static_cast<std::ptrdiff_t>(g * accessible),
            values.begin() + static_cast<std::ptrdiff_t>((g + 1) * accessible));
    };
    return LossBudget{at(0), at(1), at(2)};
}

CircuitTopology with_losses(const CircuitTopology &lossless, const LossBudget &losses) {
    lossless.validate();
    const size_t m = lossless.accessible.size();
    check_budget(losses, m);
    CircuitTopology out;
    out.modes = lossless.modes + 3 * m;
    out.accessible = lossless.accessible;
    size_t next_env = lossless.modes;
    auto add_group = [&](const std::vector<double> &group) {
        for (size_t k = 0; k < m; ++k) {
            out.elements.push_back(BeamSplitter{lossless.accessible[k], next_env++, 1 - group[k], 0});
        }
    };
    const size_t split = lossless.elements.size() / 2;
    add_group(losses.source);
    out.elements.insert(out.elements.end(), lossless.elements.begin(), lossless.elements.begin() + static_cast<std::ptrdiff_t>(split));
    add_group(losses.circuit);
    out.elements.insert(out.elements.end(), lossless.elements.begin() + static_cast<std::ptrdiff_t>(split), lossless.elements.end());
    add_group(losses.detector);
    return out;
}

TransferMatrix lossy_matrix(const CircuitTopology &lossless, const LossBudget &losses) {
    lossless.validate();
    const size_t m = lossless.accessible.size();
    check_budget(losses, m);
    auto attenuation = [&](const std::vector<double> &group) {
        Eigen::VectorXd d = Eigen::VectorXd::Ones(idx(lossless.modes));
        for (size_t k = 0; k < m; ++k) {
            d(idx(lossless.accessible[k])) = std::sqrt(1 - group[k]);
        }
        return d;
    };
    const size_t split = lossless.elements.size() / 2;
    ComplexMatrix u = attenuation(losses.source).cast<Complex>().asDiagonal();
    for (size_t k = 0; k < split; ++k) {
        apply_element(u, lossless.elements[k]);
    }
    u = u * attenuation(losses.circuit).cast<Complex>().asDiagonal();
    for (size_t k = split; k < lossless.elements.size(); ++k) {
        apply_element(u, lossless.elements[k]);
    }
    u = u * attenuation(losses.detector).cast<Complex>().asDiagonal();
    return TransferMatrix(restrict_to(u, lossless.accessible));
}

LossFit fit_loss_budget(const CircuitTopology &lossless, const TransferMatrix &target, const LossFitOptions &options) {
    lossless.validate();
    const size_t m = lossless.accessible.size();
    if (target.size() != m) {
        throw std::invalid_argument("target matrix size does not match the topology's accessible modes");
    }
    const Eigen::MatrixXd target_abs = target.entries().cwiseAbs();
    const size_t dim = 3 * m;

    auto magnitude_error = [&](const std::vector<double> &losses) -> Eigen::VectorXd {
        Eigen::MatrixXd diff = lossy_matrix(lossless, LossBudget::unflatten(losses, m)).entries().cwiseAbs() - target_abs;
        return Eigen::Map<Eigen::VectorXd>(diff.data(), diff.size());
    };

    DifferentialEvolutionOptions de;
    de.seed = options.seed;
    de.population = options.population;
    de.generations = options.generations;
    de.target = 0.01 * options.max_residual * options.max_residual;
    auto global = differential_evolution(
        [&](const Eigen::VectorXd &x) { return magnitude_error(std::vector<double>(x.data(), x.data() + x.size())).squaredNorm(); },
        Eigen::VectorXd::Zero(idx(dim)), Eigen::VectorXd::Ones(idx(dim)), de);

    // Polish in u with loss = sin^2(u), which keeps every loss inside [0, 1].
    auto to_losses = [&](const Eigen::VectorXd &u) {
        std::vector<double> l(dim);
        for (size_t k = 0; k < dim; ++k) {
            double s = std::sin(u(idx(k)));
            l[k] = s * s;
        }
        return l;
    };
    Eigen::VectorXd u0(idx(dim));
    for (size_t k = 0; k < dim; ++k) {
        u0(idx(k)) = std::asin(std::sqrt(std::clamp(global.x(idx(k)), 0.0, 1.0)));
    }
    LevenbergMarquardtOptions lm;
    lm.max_iterations = options.polish_iterations;
    lm.cost_target = 1e-30;
    auto polished = levenberg_marquardt([&](const Eigen::VectorXd &u) { return magnitude_error(to_losses(u)); }, u0, lm);

    std::vector<double> best = to_losses(polished.x);
    double residual = magnitude_error(best).norm();
    double de_residual = std::sqrt(global.value);
    if (de_residual < residual) {
        best.assign(global.x.data(), global.x.data() + global.x.size());
        residual = de_residual;
    }
    if (!(residual <= options.max_residual)) {
        throw ConvergenceError(
            "loss fit did not converge: residual " + std::to_string(residual) + " exceeds " +
                std::to_string(options.max_residual),
            residual);
    }
    LossFit fit;
    fit.losses = LossBudget::unflatten(best, m);
    fit.relative = relative_of(fit.losses, fit.source_scale, fit.circuit_scale, fit.detector_scale);
    fit.residual = residual;
    return fit;
}

}  // namespace bosonsim
