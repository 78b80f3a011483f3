#include "jgecert/serialize.hpp"

#include "json.hpp"

namespace jgecert {

namespace {

using nlohmann::json;

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json spectrum_json(const Spectrum& s) {
  json lines = json::array();
  for (const Line& l : s.lines) {
    json v = json::array();
    for (Index i = 0; i < l.dim(); ++i) v.push_back(l.rep()(i));
    lines.push_back(std::move(v));
  }
  json out{{"all_real", s.all_real}, {"lines", std::move(lines)}};
  if (s.eigvectors) out["eigvectors"] = matrix_json(*s.eigvectors);
  return out;
}

json options_json(const BoundOptions& o) {
  return {{"n_unitaries", o.n_unitaries},
          {"include_identity", o.include_identity},
          {"reorder", o.reorder},
          {"balance", o.balance == BalanceMode::Default ? "default" : "als"},
          {"tolerances",
           {{"rank", o.rank_tol},
            {"mix", o.pencil.mix_tol},
            {"realness", o.pencil.realness_tol},
            {"simplicity", o.pencil.simplicity_tol}}}};
}

json report_json(const BoundReport& r) {
  json per = json::array();
  for (const PerPencil& p : r.per_pencil) {
    per.push_back({{"pair", {p.pair.first, p.pair.second}},
                   {"sigma_min_A", p.sigma_min_a},
                   {"sigma_min_B", p.sigma_min_b},
                   {"min_chordal_gap", p.min_chordal_gap},
                   {"epsilon_i", p.epsilon},
                   {"diagnosis", std::string(to_string(p.verdict))}});
  }
  json pairing = json::array();
  for (const auto& [a, b] : r.pairing) pairing.push_back({a, b});
  return {{"schema_version", kSchemaVersion},
          {"kind", "BoundReport"},
          {"verdict", std::string(to_string(r.verdict))},
          {"epsilon", r.epsilon},
          {"existence_radius", r.existence_radius},
          {"epsilon_vector", r.epsilon_vector},
          {"pairing", std::move(pairing)},
          {"unitary", matrix_json(r.unitary)},
          {"per_pencil", std::move(per)},
          {"best_so_far", r.best_so_far},
          {"multilinear_rank", {r.multilinear_rank[0], r.multilinear_rank[1], r.multilinear_rank[2]}},
          {"compression_residual", r.compression_residual},
          {"seed", r.seed},
          {"options", options_json(r.options)}};
}

}  // namespace

std::string spectrum_to_json(const Spectrum& s, int indent) { return spectrum_json(s).dump(indent); }

std::string report_to_json(const BoundReport& r, int indent) { return report_json(r).dump(indent); }

std::string certificate_to_json(const MeasuredCertificate& c, int indent) {
  json out{{"schema_version", kSchemaVersion},
           {"kind", "MeasuredCertificate"},
           {"verdict", std::string(to_string(c.verdict))},
           {"target", c.target == CertificateTarget::Truncated ? "truncated" : "measured"},
           {"mlsvd_error", c.mlsvd_error},
           {"core_fit_error", c.core_fit_error},
           {"fit_error", c.fit_error},
           {"epsilon", c.epsilon},
           {"slack", c.slack},
           {"compressed_ranks", {c.compressed_ranks[0], c.compressed_ranks[1], c.compressed_ranks[2]}},
           {"als_iterations", c.als_iterations},
           {"als_converged", c.als_converged},
           {"report", report_json(c.report)}};
  return out.dump(indent);
}

std::string pencil_epsilon_to_json(const PencilEpsilon& p, int indent) {
  json out{{"schema_version", kSchemaVersion},
           {"kind", "PencilEpsilon"},
           {"diagnosis", std::string(to_string(p.diagnosis.verdict))},
           {"epsilon", p.epsilon},
           {"existence_radius", p.epsilon / 2.0},
           {"sigma_min_A", p.sigma_min_a},
           {"sigma_min_B", p.sigma_min_b},
           {"min_chordal_gap", p.min_chordal_gap},
           {"mix_sigma_min", p.diagnosis.mix_sigma_min}};
  if (p.diagnosis.spectrum) out["spectrum"] = spectrum_json(*p.diagnosis.spectrum);
  return out.dump(indent);
}

}  // namespace jgecert
