// jgecert command-line interface. See README.md for the subcommands.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "jgecert/bounds.hpp"
#include "jgecert/compress.hpp"
#include "jgecert/error.hpp"
#include "jgecert/experiments.hpp"
#include "jgecert/serialize.hpp"
#include "jgecert/tensor_io.hpp"

using namespace jgecert;

namespace {

constexpr int kExitCertified = 0;
constexpr int kExitError = 1;
constexpr int kExitInconclusive = 2;

struct Globals {
  std::uint64_t seed = 1;
  double tol_rank = 1e-8;
  double tol_simple = 1e-8;
  double tol_als = 1e-8;
  std::string out;
  std::string format = "csv";
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream os(g.out, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + g.out);
  os << text;
  if (!text.empty() && text.back() != '\n') os << '\n';
}

BoundOptions bound_options(const Globals& g, int unitaries, bool reorder, bool no_identity) {
  BoundOptions o;
  o.rank_tol = g.tol_rank;
  o.pencil.simplicity_tol = g.tol_simple;
  o.n_unitaries = unitaries;
  o.reorder = reorder;
  o.include_identity = !no_identity;
  return o;
}

std::vector<Index> parse_index_list(const std::string& s, const char* what) {
  std::vector<Index> out;
  for (double v : parse_grid(s)) {
    if (v < 1 || v != static_cast<double>(static_cast<Index>(v)))
      throw ArgumentError(std::string("invalid ") + what + " value in '" + s + "'");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Existence and uniqueness certificates for best low-rank tensor approximations"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--tol-rank", g.tol_rank, "Relative singular value threshold for numerical ranks");
  app.add_option("--tol-simple", g.tol_simple, "Chordal gap below which eigenvalues count as repeated");
  app.add_option("--tol-als", g.tol_als, "ALS stopping tolerance");
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_option("--format", g.format, "Output format for experiments: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random rank-R tensor (and optionally a noisy copy)");
  std::string gen_dims;
  Index gen_rank = 0;
  double gen_snr = 0.0;
  std::string gen_prefix = "tensor";
  gen->add_option("--dims", gen_dims, "I1,I2,I3")->required();
  gen->add_option("--rank", gen_rank, "R")->required();
  auto* snr_opt = gen->add_option("--snr-db", gen_snr, "Also write prefix.noisy.txt and prefix.noise.txt");
  gen->add_option("--prefix", gen_prefix, "Output path prefix");

  // certify
  auto* certify = app.add_subcommand("certify", "Existence radius (or measured-tensor check with --measured)");
  std::string cert_file;
  Index cert_rank = 0;
  int cert_unitaries = 100;
  bool cert_measured = false, cert_reorder = false, cert_no_identity = false;
  certify->add_option("file", cert_file, "Tensor file")->required();
  certify->add_option("--rank", cert_rank, "R")->required();
  certify->add_flag("--measured", cert_measured, "Treat the tensor as measured data (MLSVD + CPD fit)");
  certify->add_option("--unitaries", cert_unitaries, "Random orthogonal mixes to try");
  certify->add_flag("--reorder", cert_reorder, "Optimize the slice pairing");
  certify->add_flag("--no-identity", cert_no_identity, "Do not try the identity mix");

  // pencil-bound
  auto* pencil = app.add_subcommand("pencil-bound", "Single-pencil epsilon for an R x R x 2 tensor");
  std::string pencil_file;
  bool pencil_als = false;
  pencil->add_option("file", pencil_file, "Tensor file")->required();
  pencil->add_flag("--als-balance", pencil_als, "Optimize the column scaling of A and B");

  // mlsvd-check
  auto* mlsvd = app.add_subcommand("mlsvd-check", "Measured-tensor existence check");
  std::string ml_file;
  Index ml_rank = 0;
  int ml_unitaries = 100;
  bool ml_truncated = false, ml_reorder = false, ml_no_identity = false;
  mlsvd->add_option("file", ml_file, "Tensor file")->required();
  mlsvd->add_option("--rank", ml_rank, "R")->required();
  mlsvd->add_option("--unitaries", ml_unitaries, "Random orthogonal mixes to try");
  mlsvd->add_flag("--truncated", ml_truncated, "Decide for the truncated MLSVD instead of the tensor itself");
  mlsvd->add_flag("--reorder", ml_reorder, "Optimize the slice pairing");
  mlsvd->add_flag("--no-identity", ml_no_identity, "Do not try the identity mix");

  // procrustes
  auto* proc = app.add_subcommand("procrustes", "Joint orthogonal compression of two tensors");
  std::string proc_a, proc_b, proc_ranks, proc_dir;
  bool proc_no_refine = false;
  proc->add_option("first", proc_a, "Tensor file W'")->required();
  proc->add_option("second", proc_b, "Tensor file W_hat'")->required();
  proc->add_option("--ranks", proc_ranks, "R1,R2,R3")->required();
  proc->add_flag("--no-refine", proc_no_refine, "Skip the ALS refinement sweeps");
  proc->add_option("--save-cores", proc_dir, "Directory for the two cores");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a predefined experiment protocol");
  std::string exp_name, exp_ranks, exp_dims, exp_snr;
  int exp_trials = 0, exp_unitaries = 0, exp_restarts = -1;
  bool exp_reorder = false, exp_identity = false;
  exp->add_option("name", exp_name, "Experiment name")->required()->check(CLI::IsMember(experiment_names()));
  exp->add_option("--ranks", exp_ranks, "Ranks, e.g. 4,10 or 2:10:1");
  exp->add_option("--dims", exp_dims, "Tensor side lengths I");
  exp->add_option("--snr", exp_snr, "SNR grid in dB, e.g. 0:100:5 or -8,0,4");
  exp->add_option("--trials", exp_trials, "Trials per grid point");
  exp->add_option("--unitaries", exp_unitaries, "Random orthogonal mixes per tensor");
  exp->add_option("--hopm-restarts", exp_restarts, "Random restarts of the rank-1 power method");
  exp->add_flag("--reorder", exp_reorder, "Optimize the slice pairing");
  exp->add_flag("--include-identity", exp_identity, "Also try the identity mix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    SeededRng rng(g.seed);
    if (*gen) {
      const auto d = parse_index_list(gen_dims, "dimension");
      if (d.size() != 3) throw ArgumentError("--dims needs three values");
      const Index smallest = std::min({d[0], d[1], d[2]});
      if (gen_rank > smallest)
        std::cerr << "warning: rank " << gen_rank << " exceeds min(dims) = " << smallest
                  << "; factors are not generically identifiable\n";
      const RandomRankR tr = random_rank_r(rng, {d[0], d[1], d[2]}, gen_rank);
      io::save_tensor(gen_prefix + ".tensor.txt", tr.tensor);
      io::save_factors(gen_prefix + ".factors.txt", tr.factors);
      if (*snr_opt) {
        const NoisyTensor nt = add_noise_at_snr(tr.tensor, rng, gen_snr);
        io::save_tensor(gen_prefix + ".noisy.txt", nt.noisy);
        io::save_tensor(gen_prefix + ".noise.txt", nt.noise);
      }
      return 0;
    }
    if (*certify) {
      const Tensor3 t = io::load_tensor(cert_file);
      const BoundOptions bo = bound_options(g, cert_unitaries, cert_reorder, cert_no_identity);
      if (cert_measured) {
        MeasuredOptions mo;
        mo.bound = bo;
        mo.als.tol = g.tol_als;
        mo.als.restarts = 3;
        const MeasuredCertificate c = mlsvd_existence_check(t, cert_rank, rng, mo);
        emit(g, certificate_to_json(c));
        return c.verdict == Verdict::Certified ? kExitCertified : kExitInconclusive;
      }
      const BoundReport r = certify_neighborhood(t, cert_rank, rng, bo);
      emit(g, report_to_json(r));
      return r.verdict == Verdict::Certified ? kExitCertified : kExitInconclusive;
    }
    if (*pencil) {
      const Tensor3 t = io::load_tensor(pencil_file);
      PencilOptions po;
      po.simplicity_tol = g.tol_simple;
      const PencilEpsilon pe =
          pencil_existence_epsilon(t, rng, po, pencil_als ? BalanceMode::Als : BalanceMode::Default);
      emit(g, pencil_epsilon_to_json(pe));
      return pe.epsilon > 0.0 ? kExitCertified : kExitInconclusive;
    }
    if (*mlsvd) {
      const Tensor3 t = io::load_tensor(ml_file);
      MeasuredOptions mo;
      mo.bound = bound_options(g, ml_unitaries, ml_reorder, ml_no_identity);
      mo.als.tol = g.tol_als;
      mo.als.restarts = 3;
      mo.target = ml_truncated ? CertificateTarget::Truncated : CertificateTarget::Measured;
      const MeasuredCertificate c = mlsvd_existence_check(t, ml_rank, rng, mo);
      emit(g, certificate_to_json(c));
      return c.verdict == Verdict::Certified ? kExitCertified : kExitInconclusive;
    }
    if (*proc) {
      const Tensor3 a = io::load_tensor(proc_a);
      const Tensor3 b = io::load_tensor(proc_b);
      const auto r = parse_index_list(proc_ranks, "rank");
      if (r.size() != 3) throw ArgumentError("--ranks needs three values");
      PairCompressOptions po;
      po.rank_tol = g.tol_rank;
      po.refine = !proc_no_refine;
      const PairCompression pc = procrustes_pair_compress(a, b, {r[0], r[1], r[2]}, po);
      if (!proc_dir.empty()) {
        std::filesystem::create_directories(proc_dir);
        io::save_tensor(std::filesystem::path(proc_dir) / "core_first.txt", pc.w);
        io::save_tensor(std::filesystem::path(proc_dir) / "core_second.txt", pc.w_hat);
        for (int i = 0; i < 3; ++i) {
          const auto idx = static_cast<std::size_t>(i);
          io::save_matrix(std::filesystem::path(proc_dir) / ("V" + std::to_string(i + 1) + ".txt"), pc.factors[idx]);
          io::save_matrix(std::filesystem::path(proc_dir) / ("Vhat" + std::to_string(i + 1) + ".txt"),
                          pc.factors_hat[idx]);
        }
      }
      nlohmann::json j{{"schema_version", kSchemaVersion},
                       {"kind", "PairCompression"},
                       {"original_distance", pc.original_distance},
                       {"initial_distance", pc.initial_distance},
                       {"compressed_distance", pc.compressed_distance},
                       {"sweep_distances", pc.sweep_distances},
                       {"ranks", r}};
      emit(g, j.dump(2));
      return 0;
    }
    if (*exp) {
      ExperimentConfig c = default_config(exp_name);
      c.seed = g.seed;
      c.rank_tol = g.tol_rank;
      c.als.tol = g.tol_als;
      c.pencil.simplicity_tol = g.tol_simple;
      if (!exp_ranks.empty()) c.ranks = parse_index_list(exp_ranks, "rank");
      if (!exp_dims.empty()) c.dims = parse_index_list(exp_dims, "dimension");
      if (!exp_snr.empty()) c.snr_grid = parse_grid(exp_snr);
      if (exp_trials > 0) c.trials = exp_trials;
      if (exp_unitaries > 0) c.n_unitaries = exp_unitaries;
      if (exp_restarts >= 0) c.hopm_restarts = exp_restarts;
      c.reorder = exp_reorder;
      c.include_identity = exp_identity;
      const Table t = run_experiment(c);
      emit(g, g.format == "csv" ? table_to_csv(t) : table_to_json(t, c));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
