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

#include "cli.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bosonsim/errors.h"
#include "bosonsim/io.h"
#include "bosonsim/lossy.h"
#include "bosonsim/noise.h"
#include "bosonsim/permanent.h"
#include "bosonsim/random_matrix.h"
#include "bosonsim/sampling.h"
#include "bosonsim/tomography.h"
#include "json.hpp"

namespace bosonsim {

namespace {

using Json = nlohmann::ordered_json;

constexpr uint64_t kDefaultSeed = 1;

struct Common {
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App *cmd, Common &c) {
    cmd->add_option("--out", c.out, "Output file (default: standard output)");
    cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const Common &c, const std::string &text, std::ostream &out) {
    if (c.out.empty()) {
        out << text;
    } else {
        write_file(c.out, text);
    }
}

ModeOccupation parse_input(const std::string &text, size_t modes) {
    auto t = ModeOccupation::from_string(text);
    if (t.num_modes() != modes) {
        throw std::invalid_argument(
            "input " + text + " has " + std::to_string(t.num_modes()) + " modes but the matrix has " + std::to_string(modes));
    }
    return t;
}

struct DistributionArgs {
    std::string matrix;
    std::string input;
    bool collision_free = false;
    bool clicks = false;
    bool renormalize = true;
};

void add_distribution_args(CLI::App *cmd, DistributionArgs &a) {
    cmd->add_option("--matrix", a.matrix, "Transfer matrix JSON file")->required();
    cmd->add_option("--input", a.input, "Input occupation, e.g. 011010")->required();
    auto *cf = cmd->add_flag("--collision-free", a.collision_free, "Restrict outcomes to one photon per mode");
    auto *cl = cmd->add_flag("--clicks", a.clicks, "Threshold detectors: N-click patterns");
    cf->excludes(cl);
    cmd->add_flag("--renormalize,!--no-renormalize", a.renormalize, "Divide by the total over the outcome set (default on)");
}

OutcomeDistribution compute_distribution(const DistributionArgs &a, TransferMatrix &lambda_out) {
    lambda_out = matrix_from_json(read_file(a.matrix));
    const auto &lambda = lambda_out;
    auto t = parse_input(a.input, lambda.size());
    const size_t n = t.total();
    OutcomeDistribution dist;
    if (a.clicks) {
        auto occ = distribution(lambda, t, enumerate_outcomes(lambda.size(), n, false), false);
        auto all = aggregate_clicks(occ);
        auto patterns = enumerate_outcomes(lambda.size(), n, true);
        std::vector<double> probs;
        for (const auto &p : patterns) {
            probs.push_back(all.probability(p));
        }
        DistributionMetadata meta{t, "", std::to_string(n) + " clicks", OutcomeKind::kClickPattern};
        dist = OutcomeDistribution(std::move(patterns), std::move(probs), std::move(meta));
        if (a.renormalize) {
            dist.renormalize();
        }
    } else {
        dist = distribution(lambda, t, enumerate_outcomes(lambda.size(), n, a.collision_free), a.renormalize);
        dist.metadata().postselection = a.collision_free ? "collision-free" : "all";
    }
    dist.metadata().matrix_id = matrix_hash(lambda);
    if (!a.renormalize) {
        dist.metadata().postselection += ", raw";
    }
    return dist;
}

std::vector<double> parse_values(const std::string &spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        std::string part;
        while (std::getline(ss, part, ':')) {
            parts.push_back(part);
        }
        if (parts.size() != 3) {
            throw CLI::ValidationError("--sweep", "ranges are start:stop:count");
        }
        double start = parse_double(parts[0], "sweep start");
        double stop = parse_double(parts[1], "sweep stop");
        uint64_t count = std::stoull(parts[2]);
        if (count == 0) {
            throw CLI::ValidationError("--sweep", "range count must be positive");
        }
        for (uint64_t k = 0; k < count; ++k) {
            out.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1));
        }
        return out;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(item, "sweep value"));
    }
    if (out.empty()) {
        throw CLI::ValidationError("--sweep", "no values");
    }
    return out;
}

// "lambda2=0,0.011;alpha=0.9:1:5"
std::map<std::string, std::vector<double>> parse_sweep(const std::string &spec) {
    std::map<std::string, std::vector<double>> out;
    std::stringstream ss(spec);
    std::string clause;
    while (std::getline(ss, clause, ';')) {
        if (clause.empty()) {
            continue;
        }
        auto eq = clause.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("--sweep", "expected key=values, got " + clause);
        }
        std::string key = clause.substr(0, eq);
        if (key != "lambda2" && key != "alpha") {
            throw CLI::ValidationError("--sweep", "unknown sweep key " + key + " (use lambda2 or alpha)");
        }
        out[key] = parse_values(clause.substr(eq + 1));
    }
    return out;
}

std::string resolve(const std::filesystem::path &base, const std::string &path) {
    std::filesystem::path p(path);
    return p.is_absolute() ? path : (base / p).string();
}

struct SweepConfig {
    DilationUnitary circuit;
    ModeOccupation input;
    NoiseParams noise;
};

SweepConfig load_sweep_config(const std::string &path) {
    auto j = Json::parse(read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw std::invalid_argument("config " + path + " is not a JSON object");
    }
    if (!j.contains("schema_version") || j["schema_version"] != kSchemaVersion) {
        throw std::invalid_argument("config " + path + ": unsupported or missing schema_version");
    }
    auto base = std::filesystem::path(path).parent_path();
    SweepConfig c;
    auto load = [&](const char *key) -> std::optional<std::string> {
        if (!j.contains(key)) {
            return std::nullopt;
        }
        const auto &v = j[key];
        if (v.is_string()) {
            return read_file(resolve(base, v.get<std::string>()));
        }
        return v.dump();
    };
    if (auto topo = load("topology")) {
        c.circuit = topology_dilation(topology_from_json(*topo));
    } else if (auto m = load("matrix")) {
        c.circuit = dilate(matrix_from_json(*m));
    } else {
        throw std::invalid_argument("config needs a \"matrix\" or \"topology\" entry");
    }
    if (!j.contains("input") || !j["input"].is_string()) {
        throw std::invalid_argument("config needs an \"input\" occupation string");
    }
    c.input = parse_input(j["input"].get<std::string>(), c.circuit.accessible);
    if (!j.contains("noise")) {
        throw std::invalid_argument("config needs a \"noise\" object");
    }
    c.noise = noise_params_from_json(j["noise"].dump());
    c.noise.validate(c.circuit.accessible);
    return c;
}

int run_bench(size_t min_n, size_t max_n, uint64_t seed, const Common &common, std::ostream &out, std::ostream &err) {
    if (min_n < 1 || max_n < min_n || max_n > kRyserPermanentMaxDim) {
        throw std::invalid_argument("bench sizes must satisfy 1 <= min <= max <= " + std::to_string(kRyserPermanentMaxDim));
    }
    using Clock = std::chrono::steady_clock;
    auto time_of = [](auto &&fn) {
        size_t reps = 0;
        auto start = Clock::now();
        double elapsed = 0;
        do {
            fn();
            ++reps;
            elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        } while (elapsed < 0.02);
        return elapsed / static_cast<double>(reps);
    };
    bool mismatch = false;
    Json rows = Json::array();
    std::string csv = "# schema_version=" + std::to_string(kSchemaVersion) + "\n# seed=" + std::to_string(seed) + "\n";
    csv += "n,naive_seconds,ryser_seconds,speedup,relative_difference\n";
    for (size_t n = min_n; n <= max_n; ++n) {
        CounterRng rng(seed, n);
        ComplexMatrix a = random_complex_matrix(n, rng);
        Complex ryser;
        double t_ryser = time_of([&] { ryser = permanent_ryser(a); });
        Json row{{"n", n}, {"ryser_seconds", t_ryser}};
        std::string line = std::to_string(n) + ",";
        if (n <= kNaivePermanentMaxDim) {
            Complex naive;
            double t_naive = time_of([&] { naive = permanent_naive(a); });
            double rel = std::abs(ryser - naive) / std::max(1.0, std::abs(naive));
            if (!(rel <= 1e-10)) {
                mismatch = true;
                err << "bench: n=" << n << " Ryser and naive permanents differ by " << rel << "\n";
            }
            row["naive_seconds"] = t_naive;
            row["speedup"] = t_naive / t_ryser;
            row["relative_difference"] = rel;
            line += format_double(t_naive) + "," + format_double(t_ryser) + "," + format_double(t_naive / t_ryser) + "," +
                    format_double(rel);
        } else {
            line += "," + format_double(t_ryser) + ",,";
        }
        rows.push_back(std::move(row));
        csv += line + "\n";
    }
    if (common.format == "json") {
        Json j{{"schema_version", kSchemaVersion}, {"seed", seed}, {"rows", std::move(rows)}};
        emit(common, j.dump(2) + "\n", out);
    } else {
        emit(common, csv, out);
    }
    return mismatch ? kExitNumerical : kExitOk;
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Exact boson sampling distributions, sampling, characterization and noise models"};
    app.name("bosonsim");
    app.require_subcommand(1);

    Common common;

    DistributionArgs dist_args;
    auto *dist_cmd = app.add_subcommand("distribution", "Exact output distribution for a matrix and input");
    add_distribution_args(dist_cmd, dist_args);
    add_common(dist_cmd, common);

    DistributionArgs sample_args;
    uint64_t samples = 0;
    uint64_t seed = kDefaultSeed;
    auto *sample_cmd = app.add_subcommand("sample", "Draw outcome counts from the exact distribution");
    add_distribution_args(sample_cmd, sample_args);
    sample_cmd->add_option("--samples", samples, "Number of draws")->required();
    sample_cmd->add_option("--seed", seed, "Random seed (default 1)");
    add_common(sample_cmd, common);

    std::string one_photon_path, two_photon_path, mask_path, matrix_out;
    size_t starts = 32;
    auto *char_cmd = app.add_subcommand("characterize", "Reconstruct a transfer matrix from one- and two-photon data");
    char_cmd->add_option("--one-photon", one_photon_path, "One-photon CSV")->required();
    char_cmd->add_option("--two-photon", two_photon_path, "Two-photon visibility CSV")->required();
    char_cmd->add_option("--mask", mask_path, "Phase mask JSON (default: nonzero magnitudes)");
    char_cmd->add_option("--seed", seed, "Seed for the multi-start phase fit (default 1)");
    char_cmd->add_option("--starts", starts, "Number of phase-fit starting points")->check(CLI::PositiveNumber);
    char_cmd->add_option("--matrix-out", matrix_out, "Also write the reconstructed matrix JSON here");
    char_cmd->add_option("--out", common.out, "Reconstruction JSON (default: standard output)");

    std::string tomo_matrix;
    uint64_t shots = 0;
    auto *tomo_cmd = app.add_subcommand("tomography-data", "Simulate characterization data for a matrix");
    tomo_cmd->add_option("--matrix", tomo_matrix, "Transfer matrix JSON file")->required();
    tomo_cmd->add_option("--shots", shots, "Photons per input for one-photon data (0: exact)");
    tomo_cmd->add_option("--seed", seed, "Random seed (default 1)");
    tomo_cmd->add_option("--one-photon", one_photon_path, "One-photon CSV to write")->required();
    tomo_cmd->add_option("--two-photon", two_photon_path, "Two-photon CSV to write")->required();

    std::string config_path, sweep_spec;
    auto *noise_cmd = app.add_subcommand("noise-sweep", "L1 distance between noisy and ideal distributions over a grid");
    noise_cmd->add_option("--config", config_path, "Sweep configuration JSON")->required();
    noise_cmd->add_option("--sweep", sweep_spec, "Grid, e.g. \"lambda2=0,0.011,0.023;alpha=0.974\" or \"lambda2=0:0.05:20\"");
    add_common(noise_cmd, common);

    size_t bench_min = 2, bench_max = 12;
    auto *bench_cmd = app.add_subcommand("bench", "Time the naive and Ryser permanent kernels");
    bench_cmd->add_option("--min", bench_min, "Smallest matrix size");
    bench_cmd->add_option("--max", bench_max, "Largest matrix size");
    bench_cmd->add_option("--seed", seed, "Random seed (default 1)");
    add_common(bench_cmd, common);

    size_t rm_size = 6;
    std::string rm_kind = "haar";
    auto *rm_cmd = app.add_subcommand("random-matrix", "Write a random transfer matrix");
    rm_cmd->add_option("--size", rm_size, "Number of modes")->check(CLI::PositiveNumber);
    rm_cmd->add_option("--kind", rm_kind, "haar or subunitary")->check(CLI::IsMember({"haar", "subunitary"}));
    rm_cmd->add_option("--seed", seed, "Random seed (default 1)");
    rm_cmd->add_option("--out", common.out, "Output file (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (dist_cmd->parsed()) {
            TransferMatrix lambda;
            auto dist = compute_distribution(dist_args, lambda);
            emit(common, common.format == "json" ? distribution_to_json(dist) : distribution_to_csv(dist), out);
        } else if (sample_cmd->parsed()) {
            DistributionArgs a = sample_args;
            a.renormalize = true;
            TransferMatrix lambda;
            auto dist = compute_distribution(a, lambda);
            SampleFile s{sample(dist, samples, seed), dist.metadata().input, matrix_hash(lambda), dist.metadata().kind};
            emit(common, common.format == "json" ? samples_to_json(s) : samples_to_csv(s), out);
        } else if (char_cmd->parsed()) {
            auto one = one_photon_from_csv(read_file(one_photon_path));
            auto two = two_photon_from_csv(read_file(two_photon_path));
            auto mag = recover_magnitudes(one);
            auto model = mask_path.empty() ? PhaseModel::from_magnitudes(mag.tau) : mask_from_json(read_file(mask_path));
            PhaseFitOptions opt;
            opt.seed = seed;
            opt.starts = starts;
            PhaseFit fit;
            try {
                fit = recover_phases(mag.tau, two, model, opt);
            } catch (const UnderdeterminedError &e) {
                err << "characterize: rank " << e.rank << " of " << e.unknowns << " free phases; " << e.missing()
                    << " missing degrees of freedom\n";
                throw;
            }
            Reconstruction rec;
            rec.tau = mag.tau;
            rec.phases = fit.phases;
            rec.residual = fit.residual;
            rec.rank = fit.rank;
            rec.free_phases = fit.free_phases;
            rec.fixed = model.fixed();
            rec.gauge_note =
                "phases listed in fixed are set to 0; each row of tau is scaled to a maximum of 1; the reconstruction is "
                "determined up to complex conjugation";
            if (!matrix_out.empty()) {
                write_file(matrix_out, matrix_to_json(rec.matrix()));
            }
            emit(common, reconstruction_to_json(rec), out);
        } else if (tomo_cmd->parsed()) {
            auto lambda = matrix_from_json(read_file(tomo_matrix));
            auto one = shots ? simulate_one_photon(lambda, shots, seed) : simulate_one_photon(lambda);
            write_file(one_photon_path, one_photon_to_csv(one));
            write_file(two_photon_path, two_photon_to_csv(simulate_visibilities(lambda)));
        } else if (noise_cmd->parsed()) {
            auto cfg = load_sweep_config(config_path);
            auto grid = parse_sweep(sweep_spec);
            std::vector<double> lambdas = grid.count("lambda2") ? grid["lambda2"]
                                          : std::vector<double>{cfg.noise.sources.empty() ? 0.0 : cfg.noise.sources[0].lambda2};
            std::vector<double> alphas = grid.count("alpha") ? grid["alpha"] : std::vector<double>{cfg.noise.alpha};
            NoiseModel model(cfg.circuit, cfg.input, cfg.noise.sources, cfg.noise.postselect_n);
            std::string csv = "# schema_version=" + std::to_string(kSchemaVersion) + "\n# input=" + cfg.input.str() + "\n";
            csv += "lambda2,alpha,d\n";
            Json points = Json::array();
            for (double a : alphas) {
                for (double l2 : lambdas) {
                    NoiseParams p = cfg.noise;
                    p.alpha = a;
                    if (grid.count("lambda2")) {
                        for (auto &s : p.sources) {
                            s.lambda2 = l2;
                        }
                    }
                    double d = l1_distance(model.evaluate(p), model.ideal());
                    csv += format_double(l2) + "," + format_double(a) + "," + format_double(d) + "\n";
                    points.push_back({{"lambda2", l2}, {"alpha", a}, {"d", d}});
                }
            }
            if (common.format == "json") {
                Json j{{"schema_version", kSchemaVersion}, {"input", cfg.input.str()}, {"points", std::move(points)}};
                emit(common, j.dump(2) + "\n", out);
            } else {
                emit(common, csv, out);
            }
        } else if (bench_cmd->parsed()) {
            return run_bench(bench_min, bench_max, seed, common, out, err);
        } else if (rm_cmd->parsed()) {
            CounterRng rng(seed);
            auto m = rm_kind == "haar" ? haar_unitary(rm_size, rng) : random_subunitary(rm_size, rng);
            emit(common, matrix_to_json(m), out);
        }
    } catch (const CLI::ValidationError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalError &e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

}  // namespace bosonsim
