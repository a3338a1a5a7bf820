#include <levylat/cli.hpp>

#include <levylat/condexp.hpp>
#include <levylat/config.hpp>
#include <levylat/effective.hpp>
#include <levylat/graphs.hpp>
#include <levylat/kinetic.hpp>
#include <levylat/mc.hpp>
#include <levylat/reference.hpp>
#include <levylat/results.hpp>
#include <levylat/wick.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace levylat {

namespace {

constexpr const char* kVersion = "levylat 0.1.0";

struct CommonOpts {
    RunConfig cfg;
    std::string config_path;
    std::string out_dir_flag;
    std::string levels_range;  // "lo..hi"
    std::string m_range;       // "lo..hi"
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON config file; flags override its keys");
    cmd->add_option("--family", o.cfg.family, "gamma | gaussian | cauchy");
    cmd->add_option("--alpha", [&o](const std::vector<std::string>& v) {
        o.cfg.alpha = RunConfig::parse_rational(v.back());
        return true;
    }, "Gamma shape at the base level (rational, e.g. 1 or 1/2)");
    cmd->add_option("--beta", [&o](const std::vector<std::string>& v) {
        o.cfg.beta = RunConfig::parse_rational(v.back());
        return true;
    }, "Gamma rate at the base level");
    cmd->add_option("--sigma", [&o](const std::vector<std::string>& v) {
        o.cfg.sigma = RunConfig::parse_rational(v.back());
        return true;
    }, "Gaussian base variance");
    cmd->add_option("--scale", [&o](const std::vector<std::string>& v) {
        o.cfg.scale = RunConfig::parse_rational(v.back());
        return true;
    }, "Cauchy scale");
    cmd->add_option("--d", o.cfg.d, "spatial dimension");
    cmd->add_option("--n", o.cfg.n, "coarse level");
    cmd->add_option("--m", o.cfg.m, "refinement depth");
    cmd->add_option("--k", o.cfg.k, "degree / order");
    cmd->add_option("--seed", o.cfg.seed, "RNG seed");
    cmd->add_option("--samples", o.cfg.samples, "Monte Carlo sample count");
    cmd->add_option("--workers", o.cfg.workers, "declared parallelism degree");
    cmd->add_option("--tol", o.cfg.tolerance, "check tolerance");
    cmd->add_option("--z", o.cfg.z_threshold, "weak-test z threshold");
    cmd->add_option("--out", o.out_dir_flag, "output directory (default $LEVYLAT_OUT or .)");
}

void finalize_config(CommonOpts& o) {
    if (!o.config_path.empty()) {
        RunConfig base = RunConfig::from_file(o.config_path);
        // flags already wrote into o.cfg; merge: file first, then re-apply any
        // flag-modified field by comparing against defaults is fragile, so we
        // instead re-parse: the CLI wrote directly into cfg, which started from
        // defaults. Strategy: load file into base, then overwrite base fields
        // that differ from a default-constructed config (flags win).
        RunConfig defaults;
        auto pick = [](auto flag_v, auto def_v, auto file_v) {
            return flag_v != def_v ? flag_v : file_v;
        };
        base.family = pick(o.cfg.family, defaults.family, base.family);
        base.alpha = pick(o.cfg.alpha, defaults.alpha, base.alpha);
        base.beta = pick(o.cfg.beta, defaults.beta, base.beta);
        base.sigma = pick(o.cfg.sigma, defaults.sigma, base.sigma);
        base.scale = pick(o.cfg.scale, defaults.scale, base.scale);
        base.d = pick(o.cfg.d, defaults.d, base.d);
        base.n = pick(o.cfg.n, defaults.n, base.n);
        base.m = pick(o.cfg.m, defaults.m, base.m);
        base.k = pick(o.cfg.k, defaults.k, base.k);
        base.level_lo = pick(o.cfg.level_lo, defaults.level_lo, base.level_lo);
        base.level_hi = pick(o.cfg.level_hi, defaults.level_hi, base.level_hi);
        base.m_lo = pick(o.cfg.m_lo, defaults.m_lo, base.m_lo);
        base.m_hi = pick(o.cfg.m_hi, defaults.m_hi, base.m_hi);
        base.m_max = pick(o.cfg.m_max, defaults.m_max, base.m_max);
        base.seed = pick(o.cfg.seed, defaults.seed, base.seed);
        base.samples = pick(o.cfg.samples, defaults.samples, base.samples);
        base.workers = pick(o.cfg.workers, defaults.workers, base.workers);
        base.tolerance = pick(o.cfg.tolerance, defaults.tolerance, base.tolerance);
        base.z_threshold = pick(o.cfg.z_threshold, defaults.z_threshold, base.z_threshold);
        base.grid_max = pick(o.cfg.grid_max, defaults.grid_max, base.grid_max);
        base.grid_points = pick(o.cfg.grid_points, defaults.grid_points, base.grid_points);
        base.out_dir = pick(o.cfg.out_dir, defaults.out_dir, base.out_dir);
        o.cfg = base;
    }
    if (!o.out_dir_flag.empty()) {
        o.cfg.out_dir = o.out_dir_flag;
    } else if (o.cfg.out_dir == ".") {
        if (const char* env = std::getenv("LEVYLAT_OUT")) o.cfg.out_dir = env;
    }
    o.cfg.validate_and_clamp();
}

void parse_range(const std::string& text, int& lo, int& hi) {
    if (text.empty()) return;
    auto pos = text.find("..");
    if (pos == std::string::npos) {
        lo = hi = std::stoi(text);
        return;
    }
    lo = std::stoi(text.substr(0, pos));
    hi = std::stoi(text.substr(pos + 2));
}

void emit(const CommonOpts& o, const std::string& cmd,
          const std::vector<std::string>& columns, const std::vector<ResultRecord>& records) {
    namespace fs = std::filesystem;
    fs::create_directories(o.cfg.out_dir);
    fs::path base = fs::path(o.cfg.out_dir);
    write_text_file((base / (cmd + ".jsonl")).string(), to_json_lines(records));
    write_text_file((base / (cmd + ".csv")).string(), to_csv(columns, records));
    RunManifest man;
    man.tool_version = kVersion;
    man.command = cmd;
    man.config_echo = o.cfg.canonical_echo();
    man.config_hash = fnv1a_hash(man.config_echo);
    man.seed = o.cfg.seed;
    man.workers = o.cfg.workers;
    write_text_file((base / (cmd + ".manifest.json")).string(), manifest_json(man));
}

int run_verify_compat(CommonOpts& o) {
    finalize_config(o);
    ReferenceFamily fam = o.cfg.make_family();
    auto grid = make_xi_grid(o.cfg.grid_max, o.cfg.grid_points);
    std::vector<ResultRecord> records;
    bool all_ok = true;
    for (int n = o.cfg.level_lo; n <= o.cfg.level_hi; ++n) {
        auto rep = fam.verify_compatibility(n, grid);
        bool ok = rep.max_deviation < o.cfg.tolerance && !rep.branch_warning;
        all_ok = all_ok && ok;
        ResultRecord rec;
        rec.add("family", o.cfg.family);
        rec.add("n", static_cast<std::int64_t>(n));
        rec.add("max_deviation", rep.max_deviation);
        rec.add("arg_at_max", rep.arg_at_max);
        rec.add("tolerance", o.cfg.tolerance);
        rec.add("pass", ok);
        records.push_back(std::move(rec));
        std::cout << (ok ? "ok  " : "FAIL") << " compat " << o.cfg.family << " n=" << n
                  << " deviation=" << format_double(rep.max_deviation) << "\n";
    }
    emit(o, "verify-compat", {"family", "n", "max_deviation", "arg_at_max", "tolerance", "pass"},
         records);
    return all_ok ? 0 : 1;
}

int run_cond_exp(CommonOpts& o, const std::string& monomial_arg) {
    finalize_config(o);
    ReferenceFamily fam = o.cfg.make_family();
    std::vector<ResultRecord> records;
    if (!monomial_arg.empty()) {
        MonomialSpec spec;
        std::stringstream ss(monomial_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) spec.exponents.push_back(std::stol(tok));
        Rat c = gamma_cond_exp_monomial(fam, o.cfg.n, o.cfg.m, spec);
        ResultRecord rec;
        rec.add("family", o.cfg.family);
        rec.add("n", static_cast<std::int64_t>(o.cfg.n));
        rec.add("m", static_cast<std::int64_t>(o.cfg.m));
        rec.add("monomial", monomial_arg);
        rec.add("total_degree", static_cast<std::int64_t>(spec.total()));
        rec.add("coefficient", c);
        records.push_back(std::move(rec));
        std::cout << "coefficient " << rat_string(c) << " on x^" << spec.total() << "\n";
        emit(o, "cond-exp", {"family", "n", "m", "monomial", "total_degree", "coefficient"},
             records);
        return 0;
    }
    Polynomial p = cond_exp_power(fam, o.cfg.n, o.cfg.m, o.cfg.k);
    for (int deg = p.degree(); deg >= 0; --deg) {
        ResultRecord rec;
        rec.add("family", o.cfg.family);
        rec.add("n", static_cast<std::int64_t>(o.cfg.n));
        rec.add("m", static_cast<std::int64_t>(o.cfg.m));
        rec.add("k", static_cast<std::int64_t>(o.cfg.k));
        rec.add("degree", static_cast<std::int64_t>(deg));
        rec.add("coefficient", p.coeff(deg));
        records.push_back(std::move(rec));
    }
    std::cout << "E[x^" << o.cfg.k << " | coarse] = " << p << "\n";
    emit(o, "cond-exp", {"family", "n", "m", "k", "degree", "coefficient"}, records);
    return 0;
}

int run_wick(CommonOpts& o, const std::string& route) {
    finalize_config(o);
    ReferenceFamily fam = o.cfg.make_family();
    WickPolynomial w;
    if (route == "subtraction") {
        w = wick_by_subtraction(fam, o.cfg.n, o.cfg.k, 6);
    } else if (fam.kind() == FamilyKind::Gamma) {
        w = wick_gamma(fam, o.cfg.n, o.cfg.k);
    } else {
        w = wick_gaussian(fam, o.cfg.n, o.cfg.k);
    }
    std::vector<ResultRecord> records;
    std::ostringstream list;
    list << "[";
    for (int deg = w.poly.degree(); deg >= 0; --deg) {
        ResultRecord rec;
        rec.add("family", o.cfg.family);
        rec.add("n", static_cast<std::int64_t>(o.cfg.n));
        rec.add("k", static_cast<std::int64_t>(o.cfg.k));
        rec.add("degree", static_cast<std::int64_t>(deg));
        rec.add("coefficient", w.poly.coeff(deg));
        records.push_back(std::move(rec));
        if (deg != w.poly.degree()) list << ", ";
        list << rat_string(w.poly.coeff(deg));
    }
    list << "]";
    Rat residual = martingale_residual(fam, o.cfg.n, 1, o.cfg.k);
    ResultRecord summary;
    summary.add("family", o.cfg.family);
    summary.add("n", static_cast<std::int64_t>(o.cfg.n));
    summary.add("k", static_cast<std::int64_t>(o.cfg.k));
    summary.add("coefficients_desc", list.str());
    summary.add("martingale_residual", residual);
    records.push_back(std::move(summary));
    std::cout << "V^" << o.cfg.n << "_" << o.cfg.k << " coefficients " << list.str()
              << "  martingale residual " << rat_string(residual) << "\n";
    emit(o, "wick",
         {"family", "n", "k", "degree", "coefficient", "coefficients_desc", "martingale_residual"},
         records);
    return residual == 0 ? 0 : 1;
}

int run_kinetic_ren(CommonOpts& o) {
    finalize_config(o);
    ReferenceFamily fam = o.cfg.make_family();
    KineticCondExp ce = cond_exp_t_app(fam, o.cfg.n, o.cfg.m);
    std::vector<ResultRecord> records;
    ResultRecord rec;
    rec.add("family", o.cfg.family);
    rec.add("d", static_cast<std::int64_t>(o.cfg.d));
    rec.add("n", static_cast<std::int64_t>(o.cfg.n));
    rec.add("m", static_cast<std::int64_t>(o.cfg.m));
    rec.add("multiplier", ce.multiplier);
    rec.add("shift_const", ce.shift.coeff(0));
    rec.add("shift_x", ce.shift.coeff(1));
    rec.add("shift_x2", ce.shift.coeff(2));
    bool identity_ok = true;
    if (o.cfg.n >= 1) {
        SitePolynomial diff =
            brute_force_kinetic_cond_exp(fam, o.cfg.n, o.cfg.m) - kinetic_identity_rhs(fam, o.cfg.n, o.cfg.m);
        identity_ok = diff.is_zero();
        rec.add("identity_exact", identity_ok);
    }
    if (fam.kind() == FamilyKind::Gamma) {
        rec.add("counterterm_coeff", gamma_counterterm_coefficient(fam, o.cfg.n));
        rec.add("adjacency_diag", kinetic_adjacency_gamma_diagonal(fam, o.cfg.n));
        rec.add("adjacency_offdiag", kinetic_adjacency_gamma_offdiagonal(o.cfg.n));
    } else if (fam.kind() == FamilyKind::Gaussian) {
        rec.add("counterterm_const", gaussian_counterterm_constant(fam, o.cfg.n));
    }
    records.push_back(std::move(rec));
    std::cout << (identity_ok ? "ok  " : "FAIL") << " kinetic shift = " << ce.shift << "\n";
    emit(o, "kinetic-ren",
         {"family", "d", "n", "m", "multiplier", "shift_const", "shift_x", "shift_x2",
          "identity_exact", "counterterm_coeff", "adjacency_diag", "adjacency_offdiag",
          "counterterm_const"},
         records);
    return identity_ok ? 0 : 1;
}

int run_graph_expand(CommonOpts& o, bool mass_case) {
    finalize_config(o);
    ReferenceFamily fam = o.cfg.make_family();
    if (fam.kind() != FamilyKind::Gamma) {
        std::cerr << "graph-expand requires the gamma family\n";
        return 2;
    }
    int k = std::min(o.cfg.k, 3);
    int m = std::min(o.cfg.m, 2);
    LatticeConfig lat(o.cfg.d);
    FieldSampler geometry(fam, o.cfg.n, m);
    QuadraticForm lagrangian =
        mass_case ? mass_lren(fam, o.cfg.n + m, lat.cells(o.cfg.n + m))
                  : kinetic_adjacency_gamma(fam, o.cfg.n + m);
    GammaGraphContext ctx{fam, o.cfg.n, m,
                          [&geometry](long s) { return geometry.cell_of_fine(s); }};
    SitePolynomial cumulant = lagrangian_cumulant(ctx, lagrangian, k);

    std::vector<ResultRecord> records;
    for (const auto& [mono, coeff] : cumulant.terms()) {
        std::ostringstream ms;
        bool first = true;
        for (const auto& [site, exp] : mono) {
            if (!first) ms << "*";
            ms << "x" << site << "^" << exp;
            first = false;
        }
        ResultRecord rec;
        rec.add("kind", mass_case ? std::string("mass") : std::string("kinetic"));
        rec.add("n", static_cast<std::int64_t>(o.cfg.n));
        rec.add("m", static_cast<std::int64_t>(m));
        rec.add("k", static_cast<std::int64_t>(k));
        rec.add("monomial", mono.empty() ? std::string("1") : ms.str());
        rec.add("coefficient", coeff);
        records.push_back(std::move(rec));
    }
    std::cout << "order-" << k << " cumulant has " << cumulant.terms().size() << " monomials\n";
    emit(o, "graph-expand", {"kind", "n", "m", "k", "monomial", "coefficient"}, records);
    return 0;
}

int run_mass_eff(CommonOpts& o) {
    finalize_config(o);
    ReferenceFamily fam = o.cfg.make_family();
    if (fam.kind() != FamilyKind::Gamma) {
        std::cerr << "mass-eff requires the gamma family\n";
        return 2;
    }
    LimitReport rep = mass_coefficient_limit(fam, o.cfg.n, o.cfg.k, o.cfg.m_max);
    PartitionCombinatorics pc = partition_numbers(o.cfg.k);

    std::vector<ResultRecord> records;
    for (std::size_t i = 0; i < rep.values.size(); ++i) {
        ResultRecord rec;
        rec.add("k", static_cast<std::int64_t>(o.cfg.k));
        rec.add("m", static_cast<std::int64_t>(i + 1));
        rec.add("value", rep.values[i]);
        if (i > 0) rec.add("difference", rep.differences[i - 1]);
        records.push_back(std::move(rec));
    }
    ResultRecord summary;
    summary.add("k", static_cast<std::int64_t>(o.cfg.k));
    summary.add("extrapolated", rep.extrapolated);
    summary.add("converged", rep.converged);
    summary.add("monotone_decay", rep.monotone_decay);
    summary.add("envelope", mass_limit_envelope(fam, o.cfg.n, o.cfg.k));
    summary.add("bell", Rat(pc.bell));
    summary.add("integer_partitions", Rat(pc.integer_partitions));
    summary.add("bell_vs_integer_gap", pc.bell_vs_integer_gap);
    records.push_back(std::move(summary));
    std::cout << (rep.monotone_decay ? "ok  " : "FAIL") << " mass-eff k=" << o.cfg.k
              << " limit=" << format_double(to_double(rep.extrapolated))
              << " placements sum to " << pc.bell.str() << " (integer partitions "
              << pc.integer_partitions.str() << ")\n";
    emit(o, "mass-eff",
         {"k", "m", "value", "difference", "extrapolated", "converged", "monotone_decay",
          "envelope", "bell", "integer_partitions", "bell_vs_integer_gap"},
         records);
    return rep.monotone_decay ? 0 : 1;
}

int run_divergence_scan(CommonOpts& o) {
    finalize_config(o);
    ReferenceFamily fam = o.cfg.make_family();
    if (fam.kind() != FamilyKind::Gamma) {
        std::cerr << "divergence-scan requires the gamma family\n";
        return 2;
    }
    auto rows = divergence_scan(fam, o.cfg.n, std::min(o.cfg.k, 3), o.cfg.m_lo, o.cfg.m_hi);
    std::vector<ResultRecord> records;
    bool all_ok = true;
    const double log2 = std::log(2.0);
    for (const auto& row : rows) {
        ResultRecord rec;
        rec.add("class", row.diagram);
        rec.add("stratum", static_cast<std::int64_t>(row.stratum));
        rec.add("m", static_cast<std::int64_t>(row.m));
        rec.add("value", row.value);
        rec.add("fitted_slope", row.fitted_slope);
        rec.add("predicted_exponent", static_cast<std::int64_t>(
                                          row.predicted_exponent == kVanishesIdentically
                                              ? 0
                                              : row.predicted_exponent));
        rec.add("verdict", row.verdict);
        rec.add("fit_degenerate", row.fit_degenerate);
        records.push_back(std::move(rec));
        if (!row.fit_degenerate && row.verdict != "zero") {
            // classification gate: finite-depth corrections shift the fit by
            // O(2^-m) per unit m, so allow a small absolute band
            double predicted_slope = row.predicted_exponent * log2;
            if (std::abs(row.fitted_slope - predicted_slope) > 0.15) all_ok = false;
        }
    }
    std::cout << (all_ok ? "ok  " : "FAIL") << " divergence-scan " << rows.size() << " rows\n";
    emit(o, "divergence-scan",
         {"class", "stratum", "m", "value", "fitted_slope", "predicted_exponent", "verdict",
          "fit_degenerate"},
         records);
    return all_ok ? 0 : 1;
}

int run_mc_check(CommonOpts& o) {
    finalize_config(o);
    ReferenceFamily fam = o.cfg.make_family();
    if (fam.kind() == FamilyKind::Cauchy) {
        std::cerr << "mc-check requires a family with finite moments\n";
        return 2;
    }
    std::vector<ResultRecord> records;
    bool all_ok = true;
    auto push_reports = [&](const std::vector<WeakTestReport>& reports) {
        for (const auto& r : reports) {
            all_ok = all_ok && r.pass;
            ResultRecord rec;
            rec.add("identity", r.identity);
            rec.add("test_function", r.test_function);
            rec.add("estimate", r.estimate);
            rec.add("reference", r.reference);
            rec.add("se", r.std_error);
            rec.add("z", r.z);
            rec.add("pass", r.pass);
            records.push_back(std::move(rec));
            std::cout << (r.pass ? "ok  " : "FAIL") << " " << r.identity << " [H=" << r.test_function
                      << "] z=" << format_double(r.z) << "\n";
        }
    };
    for (const auto& ident : standard_weak_identities(fam))
        push_reports(run_weak_test(ident, o.cfg.samples, o.cfg.seed, o.cfg.z_threshold,
                                   o.cfg.workers));
    if (fam.kind() == FamilyKind::Gamma)
        push_reports(mc_cumulants(fam, 0, 1, 2, o.cfg.samples, o.cfg.seed + 17,
                                  o.cfg.z_threshold, o.cfg.workers));
    emit(o, "mc-check",
         {"identity", "test_function", "estimate", "reference", "se", "z", "pass"}, records);
    return all_ok ? 0 : 1;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv) {
    CLI::App app{"Exact conditional-moment calculus and effective-density expansions for "
                 "infinitely divisible fields on refining lattices"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonOpts o_compat, o_cond, o_wick, o_kin, o_graph, o_mass, o_div, o_mc;
    std::string monomial_arg, wick_route = "closed";
    bool graph_mass = false;

    auto* compat = app.add_subcommand("verify-compat", "refinement compatibility of the marginals");
    add_common(compat, o_compat);
    compat->add_option("--levels", o_compat.levels_range, "level range lo..hi");

    auto* cond = app.add_subcommand("cond-exp", "conditional moments of refined values");
    add_common(cond, o_cond);
    cond->add_option("--monomial", monomial_arg, "comma-separated exponents on distinct children");

    auto* wick = app.add_subcommand("wick", "renormalized polynomials");
    add_common(wick, o_wick);
    wick->add_option("--route", wick_route, "closed | subtraction");

    auto* kin = app.add_subcommand("kinetic-ren", "kinetic conditional identity and counterterms");
    add_common(kin, o_kin);

    auto* graph = app.add_subcommand("graph-expand", "connected-graph cumulants of a quadratic density");
    add_common(graph, o_graph);
    graph->add_flag("--mass", graph_mass, "mass perturbation instead of kinetic adjacency");

    auto* mass = app.add_subcommand("mass-eff", "effective-density coefficients for the mass case");
    add_common(mass, o_mass);
    mass->add_option("--m-max", o_mass.cfg.m_max, "largest refinement depth in the sequence");

    auto* divs = app.add_subcommand("divergence-scan", "diagram-class growth vs counting rules");
    add_common(divs, o_div);
    divs->add_option("--m-range", o_div.m_range, "fit range lo..hi");

    auto* mc = app.add_subcommand("mc-check", "weak Monte Carlo tests of the closed forms");
    add_common(mc, o_mc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help() << "\n";
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    }

    try {
        if (compat->parsed()) {
            parse_range(o_compat.levels_range, o_compat.cfg.level_lo, o_compat.cfg.level_hi);
            return run_verify_compat(o_compat);
        }
        if (cond->parsed()) return run_cond_exp(o_cond, monomial_arg);
        if (wick->parsed()) return run_wick(o_wick, wick_route);
        if (kin->parsed()) return run_kinetic_ren(o_kin);
        if (graph->parsed()) return run_graph_expand(o_graph, graph_mass);
        if (mass->parsed()) return run_mass_eff(o_mass);
        if (divs->parsed()) {
            parse_range(o_div.m_range, o_div.cfg.m_lo, o_div.cfg.m_hi);
            return run_divergence_scan(o_div);
        }
        if (mc->parsed()) return run_mc_check(o_mc);
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace levylat
