#include "klab/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace klab {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

Json ineq_to_json(const IneqReport& rep) {
    Json out = Json::array();
    for (const auto& c : rep.checks) {
        out.push_back(Json{{"name", c.name},
                           {"worst_ratio", c.worst_ratio},
                           {"witness", c.witness},
                           {"bound", c.bound},
                           {"pass", c.pass}});
    }
    return out;
}

} // namespace

KoetheMatrix matrix_from_spec(const Json& spec) {
    if (!spec.is_object()) throw ConfigError("matrix spec must be an object");
    if (spec.contains("grid")) {
        if (!spec.contains("K") || !spec.contains("N"))
            throw ConfigError("explicit matrix grid needs K and N");
        const auto K = spec.at("K").get<std::size_t>();
        const auto N = spec.at("N").get<std::size_t>();
        Vec grid = spec.at("grid").get<Vec>();
        return KoetheMatrix(K, N, std::move(grid));
    }
    const std::string family = spec.value("family", "");
    if (family == "power") {
        const Vec e = spec.at("exponents").get<Vec>();
        const auto N = spec.at("N").get<std::size_t>();
        Vec grid;
        grid.reserve(e.size() * N);
        for (double ek : e)
            for (std::size_t n = 1; n <= N; ++n) grid.push_back(std::pow(static_cast<double>(n), ek));
        return KoetheMatrix(e.size(), N, std::move(grid));
    }
    if (family == "geometric") {
        const double base = spec.at("base").get<double>();
        const Vec e = spec.at("exponents").get<Vec>();
        const auto N = spec.at("N").get<std::size_t>();
        Vec grid;
        grid.reserve(e.size() * N);
        for (double ek : e)
            for (std::size_t n = 1; n <= N; ++n)
                grid.push_back(std::pow(base, ek * static_cast<double>(n)));
        return KoetheMatrix(e.size(), N, std::move(grid));
    }
    throw ConfigError("unknown matrix family '" + family + "'");
}

OperatorMatrix operator_from_spec(const Json& spec, std::size_t N) {
    if (!spec.is_object()) throw ConfigError("operator spec must be an object");
    if (spec.contains("grid")) {
        Vec grid = spec.at("grid").get<Vec>();
        if (grid.size() != N * N) throw ConfigError("operator grid size does not match matrix N");
        return OperatorMatrix(N, std::move(grid));
    }
    const std::string family = spec.value("family", "");
    if (family == "coordinate-projection") {
        const auto coords = spec.at("coords").get<std::vector<std::size_t>>();
        Vec grid(N * N, 0.0);
        for (std::size_t c : coords) {
            if (c < 1 || c > N) throw ConfigError("coordinate-projection coordinate out of range");
            grid[(c - 1) * N + (c - 1)] = 1.0;
        }
        return OperatorMatrix(N, std::move(grid));
    }
    if (family == "random-nonneg") {
        const double density = spec.at("density").get<double>();
        if (!(density > 0.0 && density <= 1.0)) throw ConfigError("density must lie in (0,1]");
        const auto seed = spec.at("seed").get<std::uint64_t>();
        Rng rng(seed);
        Vec grid(N * N, 0.0);
        for (auto& v : grid) {
            const double gate = rng.uniform();
            const double val = rng.uniform();
            if (gate < density) v = val;
        }
        return OperatorMatrix(N, std::move(grid));
    }
    throw ConfigError("unknown operator family '" + family + "'");
}

PipelineConfig PipelineConfig::parse(const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    PipelineConfig cfg;
    if (!j.contains("matrix")) throw ConfigError("config needs a 'matrix' spec");
    if (!j.contains("operator")) throw ConfigError("config needs an 'operator' spec");
    cfg.matrix_spec = j.at("matrix");
    cfg.operator_spec = j.at("operator");
    if (j.contains("tolerances")) {
        const Json& t = j.at("tolerances");
        cfg.tol.tau_rank = t.value("tau_rank", cfg.tol.tau_rank);
        cfg.tol.tau_orth = t.value("tau_orth", cfg.tol.tau_orth);
        cfg.tol.tau_cone = t.value("tau_cone", cfg.tol.tau_cone);
    }
    if (j.contains("cone_grades")) cfg.cone_grades = j.at("cone_grades").get<std::vector<std::size_t>>();
    if (j.contains("truncation_levels"))
        cfg.truncation_levels = j.at("truncation_levels").get<std::vector<std::size_t>>();
    cfg.samples = j.value("samples", cfg.samples);
    const bool random_spec = cfg.operator_spec.value("family", "") == "random-nonneg";
    if (!j.contains("seed") && random_spec)
        throw ConfigError("config with random specs must carry a seed");
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

PipelineConfig PipelineConfig::demo() {
    PipelineConfig cfg;
    cfg.matrix_spec = Json{{"family", "geometric"}, {"base", 4.0}, {"exponents", {0.0, 1.0, 3.0, 7.0}}, {"N", 4}};
    cfg.operator_spec = Json{{"family", "coordinate-projection"}, {"coords", {1, 2}}};
    cfg.truncation_levels = {2, 3, 4};
    cfg.samples = 1000;
    cfg.seed = 42;
    return cfg;
}

Json PipelineConfig::to_json() const {
    Json t{{"tau_rank", tol.tau_rank}, {"tau_orth", tol.tau_orth}, {"tau_cone", tol.tau_cone}};
    return Json{{"matrix", matrix_spec},
                {"operator", operator_spec},
                {"tolerances", t},
                {"cone_grades", cone_grades},
                {"truncation_levels", truncation_levels},
                {"samples", samples},
                {"seed", seed}};
}

PipelineResult run_pipeline(const PipelineConfig& cfg, PipelineMode mode) {
    Json report;
    report["tool_version"] = kToolVersion;
    report["config"] = cfg.to_json();
    report["config_hash"] = hex64(fnv1a(cfg.to_json().dump()));
    bool pass = true;
    std::string stage = "load";

    try {
        // Stage: load + normalization.
        KoetheMatrix m = matrix_from_spec(cfg.matrix_spec);
        stage = "normalize";
        ConditionReport cond = verify_conditions(m);
        Json norm_json;
        norm_json["input_passes"] = cond.all_pass;
        if (!cond.all_pass) {
            NormalizeResult nr = normalize(m);
            m = std::move(nr.matrix);
            cond = verify_conditions(m);
            norm_json["selected_rows"] = nr.log.selected;
            norm_json["scalars"] = nr.log.scalars;
        }
        norm_json["K"] = m.grades();
        norm_json["N"] = m.dim();
        norm_json["max_entry"] = cond.max_entry;
        Json conds = Json::array();
        for (std::size_t i = 0; i < 4; ++i) {
            const auto& c = cond.condition[i];
            conds.push_back(Json{{"condition", i + 1},
                                 {"pass", c.pass},
                                 {"applicable", c.applicable},
                                 {"margin", c.margin},
                                 {"worst_k", c.worst_k},
                                 {"worst_n", c.worst_n}});
        }
        norm_json["conditions"] = conds;
        norm_json["pass"] = cond.all_pass;
        report["normalization"] = norm_json;
        pass = pass && cond.all_pass;

        // Stage: operator rescale.
        stage = "operator";
        OperatorMatrix t_raw = operator_from_spec(cfg.operator_spec, m.dim());
        RescaleResult rr = rescale_to_contraction(t_raw, m);
        const OperatorMatrix& t = rr.op;
        Json op_json;
        op_json["scale"] = rr.scale;
        op_json["row_sum_sup"] = row_sum_sup(t);
        Json gnorms = Json::array();
        bool cond5 = true;
        for (std::size_t k = 1; k < m.grades(); ++k) {
            const double g = grade_norm(t, m, k);
            gnorms.push_back(g);
            cond5 = cond5 && g <= 0.5;
        }
        op_json["grade_norms"] = gnorms;
        op_json["condition5"] = cond5;
        report["operator"] = op_json;
        pass = pass && cond5;

        // Stage: dead-end spaces.
        stage = "deadend";
        DeadEndData dd = build_deadend(m);
        Json dd_json;
        dd_json["K_inf"] = dd.K_inf;
        dd_json["D"] = dd.D;
        dd_json["delta"] = dd.delta;
        dd_json["a_inf"] = dd.a_inf;
        dd_json["b_inf"] = dd.b_inf;
        {
            double worst = 0.0;
            for (std::size_t k = 1; k <= dd.K_inf; ++k)
                worst = std::max(worst,
                                 std::abs(dd.delta[k - 1] * std::ldexp(1.0, static_cast<int>(k)) *
                                              dd.D[k + 1] -
                                          1.0));
            dd_json["delta_identity_error"] = worst;
            pass = pass && worst <= 1e-14;
        }
        {
            Rng rng(cfg.seed ^ 0x1001);
            IneqReport e1 = verify_e1(m, t, dd, rng, cfg.samples);
            dd_json["e1"] = ineq_to_json(e1);
            pass = pass && e1.all_pass();
        }
        {
            Rng rng(cfg.seed ^ 0x1002);
            IneqReport inc = verify_inclusions(m, dd, rng, cfg.samples);
            dd_json["inclusions"] = ineq_to_json(inc);
            pass = pass && inc.all_pass();
        }
        {
            Json mults = Json::array();
            for (std::size_t r = 1; r + 1 <= dd.K_inf; ++r) {
                Rng rng(cfg.seed ^ (0x2000 + r));
                IneqReport mu = verify_multipliers(m, t, dd, r, rng, cfg.samples);
                mults.push_back(Json{{"r", r}, {"checks", ineq_to_json(mu)}});
                pass = pass && mu.all_pass();
            }
            dd_json["multipliers"] = mults;
        }
        report["deadend"] = dd_json;

        if (mode == PipelineMode::Verify) {
            report["overall_pass"] = pass;
            return PipelineResult{std::move(report), pass};
        }

        // Stage: basis extraction.
        stage = "basis";
        RangeSubspace sub = range_basis(t, m, cfg.tol.tau_rank);
        BasisExpansion e = extract_basis(sub, m, dd, cfg.tol.tau_rank);
        Json basis_json;
        basis_json["rank"] = e.d;
        basis_json["lambda"] = e.lambda;
        basis_json["orth_residual"] = e.orth_residual;
        Json vectors = Json::array();
        for (std::size_t j = 1; j <= e.d; ++j)
            vectors.push_back(Json{{"j", j}, {"lambda", e.lambda[j - 1]}, {"entries", e.vector(j)}});
        basis_json["vectors"] = vectors;
        {
            Rng rng(cfg.seed ^ 0x3001);
            double worst = 0.0;
            for (std::size_t p = 0; p < cfg.samples; ++p) {
                const Vec tx = t.apply(rng.symmetric_vec(m.dim()));
                worst = std::max(worst, range_residual(m, e, tx));
            }
            basis_json["reconstruction_residual"] = worst;
            pass = pass && e.orth_residual <= cfg.tol.tau_orth && worst <= 1e-9;
        }
        {
            Rng rng(cfg.seed ^ 0x3002);
            ContractionReport cr = verify_contractions(m, t, dd, e, rng, cfg.samples);
            basis_json["contractions"] = Json{{"worst_h1_ratio", cr.worst_h1_ratio},
                                              {"worst_inf_ratio", cr.worst_inf_ratio},
                                              {"final_error", cr.final_error},
                                              {"monotone", cr.monotone},
                                              {"pass", cr.pass}};
            pass = pass && cr.pass;
        }
        report["basis"] = basis_json;

        if (mode == PipelineMode::Basis) {
            report["overall_pass"] = pass;
            return PipelineResult{std::move(report), pass};
        }

        // Stage: cone suite.
        stage = "cone";
        std::vector<std::size_t> grades = cfg.cone_grades;
        if (grades.empty())
            for (std::size_t r = 1; r + 1 <= dd.K_inf; ++r) grades.push_back(r);
        std::vector<std::size_t> levels = cfg.truncation_levels;
        if (levels.empty()) levels.push_back(m.dim());

        Json cone_json = Json::array();
        for (std::size_t r : grades) {
            Json per_r;
            per_r["r"] = r;
            Json per_level = Json::array();
            double c_hat_full = 0.0;
            std::size_t c_hat_level = 0;
            for (std::size_t np : levels) {
                ConeContext ctx = build_context(m, dd, t, r, np);
                Json lj;
                lj["N_trunc"] = np;
                lj["nu"] = ctx.nu;
                lj["b_inv_norm"] = ctx.b_inv_norm;
                lj["neumann_gap"] = ctx.neumann_gap;
                bool level_pass = ctx.nu <= 0.5 && ctx.b_inv_norm <= 2.0 && ctx.neumann_gap <= 1e-10;

                {
                    Rng rng(cfg.seed ^ (0x4000 + 64 * r + np));
                    double worst_y = 0.0, worst_z = 0.0, worst_id = 0.0;
                    for (std::size_t p = 0; p < cfg.samples; ++p) {
                        const Vec x = rng.symmetric_vec(m.dim());
                        const Decomposition dec = decompose(ctx, x);
                        const double xr = sup_norm(m, x, r);
                        if (xr > 0.0) {
                            worst_y = std::max(worst_y, sup_norm(m, dec.y, r) / xr);
                            worst_z = std::max(worst_z, sup_norm(m, dec.z, r) / xr);
                            worst_id = std::max(
                                worst_id, sup_norm(m, axpy(-1.0, axpy(-1.0, dec.z, dec.y), x), r) / xr);
                        }
                    }
                    lj["decomposition"] = Json{{"worst_y_ratio", worst_y},
                                               {"worst_z_ratio", worst_z},
                                               {"identity_error", worst_id}};
                    level_pass = level_pass && worst_y <= 4.0 && worst_z <= 4.0 && worst_id <= 1e-12;
                }
                {
                    Json per_n = Json::array();
                    double g1 = 0.0, ginf = 0.0;
                    bool ep_pass = true;
                    for (std::size_t n = 1; n <= e.d; ++n) {
                        Rng rng(cfg.seed ^ (0x5000 + 256 * r + 16 * np + n));
                        EndpointReport ep = endpoint_inequalities(ctx, t, e, dd, n, rng, cfg.samples);
                        per_n.push_back(Json{{"n", n},
                                             {"g1_ratio", ep.worst_g1_ratio},
                                             {"ginf_ratio", ep.worst_ginf_ratio},
                                             {"pass", ep.pass}});
                        g1 = std::max(g1, ep.worst_g1_ratio);
                        ginf = std::max(ginf, ep.worst_ginf_ratio);
                        ep_pass = ep_pass && ep.pass;
                    }
                    lj["endpoints"] = per_n;
                    lj["worst_g1_ratio"] = g1;
                    lj["worst_ginf_ratio"] = ginf;
                    level_pass = level_pass && ep_pass;
                }
                {
                    Rng rng(cfg.seed ^ (0x6000 + 64 * r + np));
                    const double c_hat =
                        estimate_interpolation_constant(ctx, t, e, rng, cfg.samples);
                    lj["C_hat"] = c_hat;
                    lj["C_hat_samples"] = cfg.samples;
                    if (np >= c_hat_level) { // the deepest truncation feeds the final bound
                        c_hat_level = np;
                        c_hat_full = c_hat;
                    }
                }
                {
                    Rng rng(cfg.seed ^ (0x7000 + 64 * r + np));
                    HypothesisReport hy = hypothesis_checks(ctx, dd, rng, cfg.samples);
                    lj["hypotheses"] = Json{{"semilattice", hy.semilattice},
                                            {"total", hy.total},
                                            {"g_inf_norm", hy.g_inf_norm},
                                            {"strictly_positive", hy.strictly_positive},
                                            {"pass", hy.pass}};
                    level_pass = level_pass && hy.pass;
                }
                lj["pass"] = level_pass;
                pass = pass && level_pass;
                per_level.push_back(std::move(lj));
            }
            per_r["levels"] = per_level;
            {
                Rng rng(cfg.seed ^ (0x8000 + r));
                EquicontinuityReport eq =
                    equicontinuity_check(m, e, t, r, c_hat_full, rng, cfg.samples);
                per_r["equicontinuity"] = Json{{"C_hat", c_hat_full},
                                               {"bound", eq.bound_used},
                                               {"worst_ratio", eq.worst_ratio},
                                               {"pass", eq.pass}};
                pass = pass && eq.pass;
            }
            cone_json.push_back(std::move(per_r));
        }
        report["cone"] = cone_json;
    } catch (const Error& err) {
        throw StageError(stage, err);
    }

    report["overall_pass"] = pass;
    return PipelineResult{std::move(report), pass};
}

std::vector<std::string> emit_plot_data(const Json& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> written;
    auto open = [&](const std::string& name) {
        written.push_back(name);
        std::ofstream f(fs::path(out_dir) / name);
        f << std::setprecision(17);
        return f;
    };

    if (report.contains("basis")) {
        auto f = open("lambda_decay.tsv");
        f << "j\tlambda\n";
        const auto& lambda = report.at("basis").at("lambda");
        for (std::size_t j = 0; j < lambda.size(); ++j)
            f << (j + 1) << "\t" << lambda[j].get<double>() << "\n";
    }
    if (report.contains("cone")) {
        for (const auto& per_r : report.at("cone")) {
            const auto r = per_r.at("r").get<std::size_t>();
            {
                auto f = open("chat_vs_trunc_r" + std::to_string(r) + ".tsv");
                f << "N_trunc\tC_hat\n";
                for (const auto& lv : per_r.at("levels"))
                    f << lv.at("N_trunc").get<std::size_t>() << "\t" << lv.at("C_hat").get<double>()
                      << "\n";
            }
            for (const auto& lv : per_r.at("levels")) {
                const auto np = lv.at("N_trunc").get<std::size_t>();
                auto f = open("endpoint_vs_n_r" + std::to_string(r) + "_N" + std::to_string(np) +
                              ".tsv");
                f << "n\tg1_ratio\tginf_ratio\n";
                for (const auto& row : lv.at("endpoints"))
                    f << row.at("n").get<std::size_t>() << "\t" << row.at("g1_ratio").get<double>()
                      << "\t" << row.at("ginf_ratio").get<double>() << "\n";
            }
        }
    }
    return written;
}

std::string render_text(const Json& report) {
    std::ostringstream out;
    out << "koethe-lab " << report.value("tool_version", "?") << "  config "
        << report.value("config_hash", "?") << "\n";
    if (report.contains("normalization")) {
        const auto& n = report.at("normalization");
        out << "normalization: K=" << n.at("K") << " N=" << n.at("N")
            << (n.at("pass").get<bool>() ? "  PASS" : "  FAIL") << "\n";
    }
    if (report.contains("operator")) {
        const auto& o = report.at("operator");
        out << "operator: scale=" << o.at("scale")
            << (o.at("condition5").get<bool>() ? "  condition5 PASS" : "  condition5 FAIL") << "\n";
    }
    if (report.contains("deadend")) {
        const auto& d = report.at("deadend");
        out << "deadend: K_inf=" << d.at("K_inf")
            << " delta_identity_error=" << d.at("delta_identity_error") << "\n";
    }
    if (report.contains("basis")) {
        const auto& b = report.at("basis");
        out << "basis: rank=" << b.at("rank") << " orth_residual=" << b.at("orth_residual")
            << " reconstruction=" << b.at("reconstruction_residual") << "\n";
    }
    if (report.contains("cone")) {
        for (const auto& per_r : report.at("cone")) {
            out << "cone r=" << per_r.at("r") << ":";
            for (const auto& lv : per_r.at("levels"))
                out << "  [N'=" << lv.at("N_trunc") << " nu=" << lv.at("nu")
                    << " C^=" << lv.at("C_hat") << (lv.at("pass").get<bool>() ? " ok" : " FAIL")
                    << "]";
            const auto& eq = per_r.at("equicontinuity");
            out << "  equicontinuity worst=" << eq.at("worst_ratio")
                << (eq.at("pass").get<bool>() ? " PASS" : " FAIL") << "\n";
        }
    }
    if (report.contains("overall_pass"))
        out << "overall: " << (report.at("overall_pass").get<bool>() ? "PASS" : "FAIL") << "\n";
    return out.str();
}

} // namespace klab
