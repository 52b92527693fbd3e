// mlh - metallic lightlike hypersurface verification harness.

#include "mlh/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

using namespace mlh;

void print_text_report(const RunReport& rep) {
    std::cout << "run:            " << (rep.name.empty() ? "(unnamed)" : rep.name) << "\n";
    std::cout << "backend:        " << rep.backend << "\n";
    if (!rep.error_kind.empty()) {
        std::cout << "error:          " << rep.error_kind << " - " << rep.error_detail << "\n";
    }
    if (rep.has_structure_checks) {
        std::cout << "structure:      EQ3 " << (rep.structure.polynomial_ok ? "pass" : "FAIL")
                  << ", EQ4 " << (rep.structure.symmetry_ok ? "pass" : "FAIL") << ", EQ5 "
                  << (rep.structure.pairing_ok ? "pass" : "FAIL") << " ("
                  << rep.structure.pairing_samples << " pairs)\n";
    }
    if (!rep.classification.empty())
        std::cout << "classification: " << rep.classification << "\n";
    if (!rep.identities.empty()) {
        std::cout << "identities (" << rep.samples_evaluated << " samples, "
                  << rep.samples_skipped << " skipped):\n";
        for (const auto& r : rep.identities) {
            std::cout << "  " << (r.pass ? "pass" : "FAIL") << "  " << r.id
                      << "  max_residual=" << r.max_residual;
            if (r.informational) std::cout << "  [informational]";
            if (!r.note.empty()) std::cout << "  (" << r.note << ")";
            std::cout << "\n";
        }
    }
    if (!rep.discrepancies.empty()) {
        std::cout << "discrepancies vs recorded claims:\n";
        for (const auto& d : rep.discrepancies) {
            std::cout << "  [" << d.tag << "] claimed " << d.paper_claim << "\n"
                      << "      computed " << d.computed << "\n";
        }
    }
    std::cout << "exit code:      " << rep.exit_code << "\n";
}

int emit(const RunReport& rep, const std::string& format) {
    if (format == "json")
        std::cout << report_to_json(rep).dump(2) << "\n";
    else
        print_text_report(rep);
    return rep.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"metallic lightlike hypersurface verification harness"};
    app.require_subcommand(1);

    std::string manifest_path, format = "text", identities_csv, dump_path, engine_name = "dual";
    int samples = -1;
    double tol = -1.0;
    std::uint64_t seed = 0;
    bool seed_set = false, serial = false, run_fixtures = false;

    auto add_common = [&](CLI::App* cmd, bool with_verify_opts) {
        cmd->add_option("manifest", manifest_path, "manifest JSON file")->required();
        cmd->add_option("--format", format, "output format: text|json")
            ->check(CLI::IsMember({"text", "json"}));
        if (with_verify_opts) {
            cmd->add_option("--identities", identities_csv,
                            "comma-separated identity ids, or 'all'");
            cmd->add_option("--samples", samples, "number of sample points (float backend)");
            cmd->add_option("--tol", tol, "identity tolerance")->envname("MLH_TOL");
            auto* s = cmd->add_option("--seed", seed, "sampling seed");
            cmd->callback([&, s]() { seed_set = s->count() > 0; });
            cmd->add_option("--engine", engine_name, "derivative engine: dual|fd")
                ->check(CLI::IsMember({"dual", "fd"}));
            cmd->add_flag("--serial", serial, "disable OpenMP parallel sampling");
            cmd->add_option("--dump", dump_path, "write per-sample geometry records to FILE");
        }
    };

    auto* check = app.add_subcommand("check", "structure checks only (Eqs. 3, 4, 5)");
    add_common(check, false);
    auto* classify = app.add_subcommand("classify", "build the frame and classify");
    add_common(classify, false);
    auto* verify = app.add_subcommand("verify", "full identity verification run");
    add_common(verify, true);

    auto* fix = app.add_subcommand("fixtures", "list or run the built-in fixtures");
    fix->add_flag("--run", run_fixtures, "run every fixture and compare expected outcomes");
    fix->add_option("--format", format, "output format: text|json")
        ->check(CLI::IsMember({"text", "json"}));

    auto* rnd = app.add_subcommand("random", "emit a random lightlike instance manifest");
    long rp = 1, rq = 1;
    int rdim = 5;
    std::string rsig = "-1,1,-1,1,1";
    std::uint64_t rseed = 1;
    rnd->add_option("--p", rp, "metallic p")->required();
    rnd->add_option("--q", rq, "metallic q")->required();
    rnd->add_option("--dim", rdim, "ambient dimension")->required();
    rnd->add_option("--signature", rsig, "comma-separated +-1 entries")->required();
    rnd->add_option("--seed", rseed, "generator seed")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        mlh::RunOptions opts;
        if (!identities_csv.empty()) {
            std::stringstream ss(identities_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) opts.identities.push_back(tok);
        }
        opts.samples = samples;
        if (const char* env = std::getenv("MLH_TOL"); env && tol <= 0) tol = std::atof(env);
        opts.tolerance = tol;
        if (seed_set) opts.seed = seed;
        opts.parallel = !serial;
        opts.engine =
            engine_name == "fd" ? mlh::DerivEngine::FiniteDifference : mlh::DerivEngine::Dual;
        opts.dump_path = dump_path;

        if (check->parsed()) {
            opts.structure_only = true;
            return emit(mlh::run(mlh::load_manifest_file(manifest_path), opts), format);
        }
        if (classify->parsed()) {
            opts.classify_only = true;
            return emit(mlh::run(mlh::load_manifest_file(manifest_path), opts), format);
        }
        if (verify->parsed()) {
            return emit(mlh::run(mlh::load_manifest_file(manifest_path), opts), format);
        }
        if (fix->parsed()) {
            int bad = 0;
            for (const auto& f : mlh::fixtures()) {
                if (!run_fixtures) {
                    std::cout << f.name << "  (expected: " << f.manifest.expected_outcome << ")\n";
                    continue;
                }
                mlh::RunReport rep = mlh::run(f.manifest, {});
                const std::string& want = f.manifest.expected_outcome;
                bool ok;
                if (want == "pass") {
                    ok = rep.exit_code == mlh::kExitOk && rep.discrepancies.empty();
                } else if (want == "discrepancy") {
                    ok = rep.exit_code == mlh::kExitOk && !rep.discrepancies.empty();
                } else if (want.rfind("error:", 0) == 0) {
                    ok = rep.exit_code == mlh::kExitPrecondition &&
                         rep.error_kind == want.substr(6);
                } else {
                    ok = false;
                }
                bad += !ok;
                std::cout << (ok ? "match    " : "MISMATCH ") << f.name << "  expected=" << want
                          << "  exit=" << rep.exit_code;
                if (!rep.error_kind.empty()) std::cout << "  error=" << rep.error_kind;
                if (!rep.discrepancies.empty())
                    std::cout << "  discrepancies=" << rep.discrepancies.size();
                std::cout << "\n";
                if (format == "json") std::cout << mlh::report_to_json(rep).dump(2) << "\n";
            }
            return bad == 0 ? 0 : 1;
        }
        if (rnd->parsed()) {
            std::vector<int> sig;
            std::stringstream ss(rsig);
            std::string tok;
            while (std::getline(ss, tok, ',')) sig.push_back(std::stoi(tok));
            mlh::Manifest m = mlh::generate_random_instance(rp, rq, rdim, sig, rseed);
            std::cout << mlh::manifest_to_json(m).dump(2) << "\n";
            return 0;
        }
    } catch (const mlh::schema_error& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return mlh::kExitSchema;
    } catch (const mlh::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mlh::kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mlh::kExitPrecondition;
    }
    return 0;
}
