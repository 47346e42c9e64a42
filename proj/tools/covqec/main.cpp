#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace covqec::cli;
  CLI::App app{"covqec: covariant quantum error correction bounds and recoveries"};
  app.set_version_flag("--version", std::string(COVQEC_VERSION));
  app.require_subcommand(1);

  QfiArgs qfi;
  auto* q = app.add_subcommand("qfi", "regularized SLD or RLD channel QFI as JSON");
  q->add_option("--channel", qfi.channel, "channel JSON file or name:dim:p")->required();
  q->add_option("--ham", qfi.ham, "Hamiltonian JSON file, sz, zero or diag:a,b,...")->default_val("sz");
  q->add_option("--kind", qfi.kind, "sld-reg or rld")
      ->default_val("sld-reg")
      ->check(CLI::IsMember({"sld-reg", "rld"}));

  BoundArgs bound;
  auto* b = app.add_subcommand("bound", "infidelity lower bounds as BoundReport JSON");
  b->add_option("--theorem", bound.theorem, "1 or 2")->check(CLI::IsMember({1, 2}));
  b->add_flag("--local", bound.local, "per-site QFI sum over --n identical sites");
  b->add_option("--single-error", bound.single_error, "erasure, depolarizing or generic")
      ->check(CLI::IsMember({"erasure", "depolarizing", "depolarizing-qubit", "generic"}));
  b->add_flag("--multi-error", bound.multi_error, "uniform t-erasure blocks on --n qubits");
  b->add_flag("--eastin-knill", bound.eastin_knill, "dimension-counting bound");
  b->add_option("--channel", bound.channel, "channel JSON file or name:dim:p");
  b->add_option("--ham", bound.ham, "physical (per-site) Hamiltonian")->default_val("sz");
  b->add_option("--hl", bound.hl, "logical Hamiltonian for theorem 2")->default_val("sz");
  b->add_option("--dl", bound.dl, "logical dimension")->default_val(2);
  b->add_option("--dhl", bound.dhl, "logical spectral width");
  b->add_option("--dh", bound.dh, "local spectral width")->default_val(2.0);
  b->add_option("--n", bound.n, "number of sites")->default_val(1);
  b->add_option("--t", bound.t, "sites per error block")->default_val(1);
  b->add_option("--q", bound.q, "uniform, or comma separated site probabilities")->default_val("uniform");
  b->add_option("--dims", bound.dims, "comma separated site dimensions")->delimiter(',');

  CodeArgs code;
  auto* c = app.add_subcommand("code", "recovery optimization and bounds for one code");
  c->add_option("--code", code.code, "code JSON file or thermo:n:m")->required();
  c->add_option("--noise", code.noise,
                "thermo codes: erasure or depolarizing single-site noise; explicit codes: channel on S")
      ->required();
  c->add_option("--p", code.p, "total single-error probability (thermo codes)")->default_val(1.0);
  c->add_option("--seed", code.seed, "seed for the worst-case search")->default_val(covqec::kDefaultSeed);
  c->add_option("--starts", code.starts, "random starts for the worst-case search")->default_val(50);
  c->add_option("--export-recovery", code.export_recovery, "write the chosen recovery as channel JSON");

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "CSV table over a parameter grid");
  s->add_option("--family", sweep.family, "thermo-erasure, thermo-depolarizing or bound-grid")
      ->required()
      ->check(CLI::IsMember({"thermo-erasure", "thermo-depolarizing", "bound-grid"}));
  s->add_option("--n", sweep.n, "site counts")->delimiter(',')->required();
  s->add_option("--m", sweep.m, "magnetizations")->delimiter(',')->required();
  s->add_option("--p", sweep.p, "error probabilities")->delimiter(',');
  s->add_option("--out", sweep.out, "output file, stdout when absent");
  s->add_option("--jobs", sweep.jobs, "grid points evaluated concurrently")->default_val(1);
  s->add_option("--seed", sweep.seed, "seed for the worst-case search")->default_val(covqec::kDefaultSeed);
  s->add_option("--starts", sweep.starts, "random starts for the worst-case search")->default_val(50);

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "run the acceptance suite");
  v->add_option("--filter", verify.filter, "criterion numbers or tags, comma separated");
  v->add_option("--tol-scale", verify.tol_scale, "multiply every tolerance (test mode)")->default_val(1.0);
  v->add_option("--seed", verify.seed, "seed for randomized criteria")->default_val(covqec::kDefaultSeed);
  v->add_flag("--verbose", verify.verbose, "print every individual check");
  v->add_flag("--list", verify.list, "list criteria and tags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  return guarded([&] {
    if (*q) return cmd_qfi(qfi);
    if (*b) return cmd_bound(bound);
    if (*c) return cmd_code(code);
    if (*s) return cmd_sweep(sweep);
    return cmd_verify(verify);
  });
}
