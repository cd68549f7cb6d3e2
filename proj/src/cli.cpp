#include "dkanon/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dkanon/anonymizer.hpp"
#include "dkanon/error.hpp"
#include "dkanon/io.hpp"

namespace dkanon::cli {

namespace {

Relation load_relation(const std::string& csv_path, const std::string& schema_path) {
    const std::string text = read_file(csv_path);
    const SchemaSpec spec = parse_schema_json(read_file(schema_path));
    Schema schema(csv_header(text), spec.qi, spec.sensitive);
    CsvOptions options;
    options.allow_suppressed = false;
    return parse_csv(text, std::move(schema), options);
}

struct AnonymizeArgs {
    std::string input;
    std::string schema;
    std::string constraints;
    int k = 2;
    std::string strategy = "min-choice";
    std::uint64_t seed = 0;
    std::uint64_t kmember_seed = 0;
    std::size_t candidate_cap = 10000;
    std::string output;
    std::string report;
};

int run_anonymize(const AnonymizeArgs& a) {
    const Relation r = load_relation(a.input, a.schema);
    const ConstraintSet sigma = parse_constraints_json(read_file(a.constraints));
    check_against_schema(sigma, r.schema());

    DivaConfig cfg;
    cfg.k = a.k;
    cfg.strategy = Strategy{parse_strategy(a.strategy), a.seed};
    cfg.candidate_cap = a.candidate_cap;
    cfg.kmember_seed = a.kmember_seed;

    const AnonymizationOutcome outcome = diva(r, sigma, cfg);
    if (outcome.unsatisfiable()) {
        std::cout << "unsatisfiable: no " << a.k
                  << "-anonymous suppression satisfies the constraints\n";
        return 2;
    }
    const AnonymizationResult& result = *outcome.result;
    write_file(a.output, emit_csv(result.relation));
    const MetricsReport report = build_report(result.relation, sigma, a.k);
    const std::string report_path = a.report.empty() ? a.output + ".metrics.json" : a.report;
    write_file(report_path, emit_metrics_json(report));
    std::cout << "anonymized " << result.relation.size() << " tuples: " << result.information_loss
              << " suppressed cells, normalized discernibility " << report.disc_normalized
              << "\n";
    return 0;
}

struct CheckArgs {
    std::string constraints;
    std::string implies_file;
    bool satisfiable = false;
    bool min_cover = false;
    std::string output;
};

int run_check(const CheckArgs& a) {
    const ConstraintSet sigma = parse_constraints_json(read_file(a.constraints));
    if (!a.implies_file.empty()) {
        const ConstraintSet query = parse_constraints_json(read_file(a.implies_file));
        if (query.size() != 1) {
            throw ConfigError("the implication query file must hold exactly one constraint");
        }
        const bool verdict = implies(sigma, query[0]);
        std::cout << (verdict ? "implied" : "not implied") << "\n";
        return verdict ? 0 : 2;
    }
    if (a.satisfiable) {
        const bool verdict = is_satisfiable(sigma);
        std::cout << (verdict ? "satisfiable" : "unsatisfiable") << "\n";
        return verdict ? 0 : 2;
    }
    const ConstraintSet cover = minimal_cover(sigma);
    const std::string text = emit_constraints_json(cover);
    if (a.output.empty()) {
        std::cout << text;
    } else {
        write_file(a.output, text);
        std::cout << "minimal cover keeps " << cover.size() << " of " << sigma.size()
                  << " constraints\n";
    }
    return 0;
}

struct GenArgs {
    std::string input;
    std::string schema;
    std::string cls = "proportion";
    std::vector<std::string> attrs;
    std::uint64_t seed = 0;
    int k = 0;
    std::string output;
};

int run_gen(const GenArgs& a) {
    const Relation r = load_relation(a.input, a.schema);
    GeneratorSpec spec;
    spec.cls = parse_constraint_class(a.cls);
    spec.target_attrs = a.attrs;
    spec.seed = a.seed;
    std::vector<std::string> warnings;
    const ConstraintSet sigma = generate_constraints(r, spec, a.k, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    write_file(a.output, emit_constraints_json(sigma));
    std::cout << "generated " << sigma.size() << " constraints\n";
    return 0;
}

struct SynthArgs {
    std::string spec;
    std::string output;
    std::string schema_out;
};

int run_synth(const SynthArgs& a) {
    const SynthSpec spec = parse_synth_spec_json(read_file(a.spec));
    const Relation r = synth_generate(spec);
    write_file(a.output, emit_csv(r));
    if (!a.schema_out.empty()) write_file(a.schema_out, emit_schema_json(r.schema()));
    std::cout << "wrote " << r.size() << " rows\n";
    return 0;
}

struct BenchArgs {
    std::string instances;
    std::vector<int> ks{2};
    std::vector<std::string> strategies{"min-choice"};
    std::uint64_t seed = 0;
    std::size_t candidate_cap = 10000;
    std::string output;
};

void append_csv_value(std::string& out, double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    out += buf;
}

int run_bench(const BenchArgs& a) {
    const nlohmann::json manifest = [&] {
        try {
            return nlohmann::json::parse(read_file(a.instances));
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("malformed instance manifest: ") + e.what());
        }
    }();
    if (!manifest.is_array()) throw ParseError("the instance manifest must be an array");

    std::string out = "instance,k,strategy,n_constraints,conflict_rate,satisfiable,"
                      "info_loss,disc_norm,millis\n";
    for (const auto& e : manifest) {
        if (!e.is_object() || !e.contains("name") || !e.contains("csv") ||
            !e.contains("schema") || !e.contains("constraints")) {
            throw ParseError("each instance needs \"name\", \"csv\", \"schema\", \"constraints\"");
        }
        const std::string name = e.at("name").get<std::string>();
        const Relation r = load_relation(e.at("csv").get<std::string>(),
                                         e.at("schema").get<std::string>());
        const ConstraintSet sigma =
            parse_constraints_json(read_file(e.at("constraints").get<std::string>()));
        check_against_schema(sigma, r.schema());

        for (std::size_t m = 1; m <= sigma.size(); ++m) {
            std::vector<DiversityConstraint> prefix;
            for (std::size_t i = 0; i < m; ++i) prefix.push_back(sigma[i]);
            const ConstraintSet subset(std::move(prefix));
            const auto cf = conflict_rate(r, subset);
            const bool sat = is_satisfiable(subset);
            for (const int k : a.ks) {
                for (const auto& strategy : a.strategies) {
                    DivaConfig cfg;
                    cfg.k = k;
                    cfg.strategy = Strategy{parse_strategy(strategy), a.seed};
                    cfg.candidate_cap = a.candidate_cap;
                    cfg.kmember_seed = a.seed;

                    std::optional<AnonymizationResult> result;
                    const auto t0 = std::chrono::steady_clock::now();
                    if (sat) {
                        auto outcome = diva(r, subset, cfg);
                        if (!outcome.unsatisfiable()) result = std::move(*outcome.result);
                    }
                    const auto t1 = std::chrono::steady_clock::now();
                    const auto millis =
                        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

                    out += name + "," + std::to_string(k) + "," + strategy + "," +
                           std::to_string(m) + ",";
                    if (cf) append_csv_value(out, *cf, 6);
                    out += sat ? ",true," : ",false,";
                    if (result) {
                        out += std::to_string(result->information_loss);
                        out += ',';
                        append_csv_value(
                            out, discernibility(result->relation, k).normalized, 6);
                    } else {
                        out += ',';
                    }
                    out += ',' + std::to_string(millis) + '\n';
                }
            }
        }
    }
    write_file(a.output, out);
    return 0;
}

} // namespace

int run(std::vector<std::string> args) {
    CLI::App app{"suppression-based k-anonymization under diversity constraints"};
    app.require_subcommand(1);
    int rc = 0;

    AnonymizeArgs an;
    CLI::App* anonymize = app.add_subcommand("anonymize", "publish a k-anonymous relation");
    anonymize->add_option("--input", an.input, "private CSV")->required();
    anonymize->add_option("--schema", an.schema, "schema JSON")->required();
    anonymize->add_option("--constraints", an.constraints, "constraint JSON")->required();
    anonymize->add_option("-k,--k", an.k, "anonymity parameter")->required();
    anonymize->add_option("--strategy", an.strategy, "naive | min-choice | max-fanout");
    anonymize->add_option("--seed", an.seed, "search seed");
    anonymize->add_option("--kmember-seed", an.kmember_seed, "residual clustering seed");
    anonymize->add_option("--candidate-cap", an.candidate_cap, "per-constraint enumeration cap");
    anonymize->add_option("--output", an.output, "anonymized CSV path")->required();
    anonymize->add_option("--report", an.report, "metrics JSON path (default <output>.metrics.json)");
    anonymize->callback([&] { rc = run_anonymize(an); });

    CheckArgs ch;
    CLI::App* check = app.add_subcommand("check", "constraint reasoning verdicts");
    check->add_option("--constraints", ch.constraints, "constraint JSON")->required();
    auto* implies_opt = check->add_option("--implies", ch.implies_file,
                                          "file with one constraint to test for implication");
    auto* sat_opt = check->add_flag("--satisfiable", ch.satisfiable, "test satisfiability");
    auto* cover_opt = check->add_flag("--min-cover", ch.min_cover, "compute a minimal cover");
    check->add_option("--output", ch.output, "write the minimal cover here instead of stdout");
    implies_opt->excludes(sat_opt)->excludes(cover_opt);
    sat_opt->excludes(cover_opt);
    check->callback([&] {
        if (ch.implies_file.empty() && !ch.satisfiable && !ch.min_cover) {
            throw CLI::ValidationError("pass one of --implies, --satisfiable, --min-cover");
        }
        rc = run_check(ch);
    });

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen-constraints", "derive constraints from data");
    gen_cmd->add_option("--input", gen.input, "CSV to profile")->required();
    gen_cmd->add_option("--schema", gen.schema, "schema JSON")->required();
    gen_cmd->add_option("--class", gen.cls, "minimum | average | proportion");
    gen_cmd->add_option("--attrs", gen.attrs, "target attributes")
        ->delimiter(',')
        ->required();
    gen_cmd->add_option("--seed", gen.seed, "generator seed");
    gen_cmd->add_option("-k,--k", gen.k, "drop constraints with lower bound below k (0 keeps all)");
    gen_cmd->add_option("--output", gen.output, "constraint JSON path")->required();
    gen_cmd->callback([&] { rc = run_gen(gen); });

    SynthArgs sy;
    CLI::App* synth = app.add_subcommand("synth", "generate synthetic data");
    synth->add_option("--spec", sy.spec, "data spec JSON")->required();
    synth->add_option("--output", sy.output, "CSV path")->required();
    synth->add_option("--schema-out", sy.schema_out, "also write the schema JSON here");
    synth->callback([&] { rc = run_synth(sy); });

    BenchArgs be;
    CLI::App* bench = app.add_subcommand("bench", "sweep k / constraint count / strategy");
    bench->add_option("--instances", be.instances, "instance manifest JSON")->required();
    bench->add_option("-k,--k", be.ks, "k values")->delimiter(',');
    bench->add_option("--strategies", be.strategies, "strategies")->delimiter(',');
    bench->add_option("--seed", be.seed, "seed for every run");
    bench->add_option("--candidate-cap", be.candidate_cap, "per-constraint enumeration cap");
    bench->add_option("--output", be.output, "result CSV path")->required();
    bench->callback([&] { rc = run_bench(be); });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("dkanon");
    for (const auto& s : args) argv.push_back(s.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 1;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}

} // namespace dkanon::cli
