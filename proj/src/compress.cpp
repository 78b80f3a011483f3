#include "jgecert/compress.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "jgecert/error.hpp"
#include "jgecert/kernels.hpp"
#include "jgecert/tensor_io.hpp"

namespace jgecert {

namespace {

constexpr double kRangeTol = 1e-10;

Index rank_of(const Vector& sv, double rel_tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  Index r = 0;
  while (r < sv.size() && sv(r) > rel_tol * sv(0)) ++r;
  return r;
}

std::string ranks_string(const std::array<Index, 3>& r) {
  return "(" + std::to_string(r[0]) + "," + std::to_string(r[1]) + "," + std::to_string(r[2]) + ")";
}

Matrix leading_left_vectors(const Matrix& m, Index count, Vector* sv = nullptr) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  if (sv) *sv = svd.singularValues();
  if (count <= svd.matrixU().cols()) return svd.matrixU().leftCols(count);
  // More columns requested than the thin factor provides: complete the basis.
  Eigen::HouseholderQR<Matrix> qr(svd.matrixU());
  Matrix full = qr.householderQ() * Matrix::Identity(m.rows(), m.rows());
  full.leftCols(svd.matrixU().cols()) = svd.matrixU();
  return full.leftCols(count);
}

Matrix complement_basis(const Matrix& basis) {
  const Index p = basis.rows();
  if (basis.cols() == 0) return Matrix::Identity(p, p);
  Eigen::HouseholderQR<Matrix> qr(basis);
  const Matrix q = qr.householderQ() * Matrix::Identity(p, p);
  return q.rightCols(p - basis.cols());
}

}  // namespace

Compression mlsvd_truncate(const Tensor3& t, Ranks ranks) {
  Compression c;
  for (int mode = 1; mode <= 3; ++mode) {
    const Index r = ranks[static_cast<std::size_t>(mode - 1)];
    if (r < 1 || r > t.dim(mode))
      throw DimensionError("mlsvd_truncate: rank " + std::to_string(r) + " invalid for mode " + std::to_string(mode) +
                           " of size " + std::to_string(t.dim(mode)));
    auto idx = static_cast<std::size_t>(mode - 1);
    c.factors[idx] = leading_left_vectors(unfold(t, mode), r, &c.singular_values[idx]);
  }
  Tensor3 core = t;
  for (int mode = 1; mode <= 3; ++mode)
    core = kernels::modal_product(core, c.factors[static_cast<std::size_t>(mode - 1)].transpose(), mode);
  c.core = std::move(core);
  c.residual = frobenius_norm(t - recover(c));
  return c;
}

Tensor3 recover(const Compression& c) {
  Tensor3 out = c.core;
  for (int mode = 1; mode <= 3; ++mode)
    out = kernels::modal_product(out, c.factors[static_cast<std::size_t>(mode - 1)], mode);
  return out;
}

Matrix orthogonal_procrustes_into(const Matrix& m, const Matrix& n, const Matrix& target) {
  if (m.rows() != n.rows() || m.cols() != n.cols())
    throw DimensionError("orthogonal_procrustes: operands must have equal shape");
  if (target.rows() != m.rows()) throw DimensionError("orthogonal_procrustes: target basis has wrong row count");
  const Index p = m.rows();
  const Index r = target.cols();

  Eigen::JacobiSVD<Matrix> nsvd(n, Eigen::ComputeFullU);
  const Index rn = rank_of(nsvd.singularValues(), kRangeTol);
  if (rn > r)
    throw PreconditionError("orthogonal_procrustes: rank(N) = " + std::to_string(rn) + " exceeds target dimension " +
                            std::to_string(r));
  // Basis of a dimension-r subspace containing ran(N), and its complement.
  const Matrix qn = nsvd.matrixU().leftCols(r);
  const Matrix qn_perp = nsvd.matrixU().rightCols(p - r);
  const Matrix qt_perp = complement_basis(target);

  const Matrix small = (target.transpose() * m) * (qn.transpose() * n).transpose();
  Eigen::JacobiSVD<Matrix> ssvd(small, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix u_small = ssvd.matrixU() * ssvd.matrixV().transpose();
  return target * u_small * qn.transpose() + qt_perp * qn_perp.transpose();
}

Matrix orthogonal_procrustes(const Matrix& m, const Matrix& n) {
  if (m.rows() != n.rows() || m.cols() != n.cols())
    throw DimensionError("orthogonal_procrustes: operands must have equal shape");
  Eigen::JacobiSVD<Matrix> msvd(m, Eigen::ComputeFullU);
  const Index rm = rank_of(msvd.singularValues(), kRangeTol);
  Eigen::JacobiSVD<Matrix> nsvd(n);
  const Index rn = rank_of(nsvd.singularValues(), kRangeTol);
  if (rm >= rn) return orthogonal_procrustes_into(m, n, msvd.matrixU().leftCols(rm));
  Eigen::JacobiSVD<Matrix> svd(m * n.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

namespace {

// Mode-by-mode construction visiting the modes cyclically from `first`, then refinement.
PairCompression pair_compress_from(const Tensor3& w, const Tensor3& w_hat, const Ranks& ranks,
                                   const PairCompressOptions& opts, int first) {
  PairCompression out;
  Tensor3 cur = w;
  Tensor3 cur_hat = w_hat;
  for (int step = 0; step < 3; ++step) {
    const int mode = 1 + (first - 1 + step) % 3;
    const auto idx = static_cast<std::size_t>(mode - 1);
    const Matrix m = unfold(cur, mode);
    const Matrix n = unfold(cur_hat, mode);
    Matrix v = leading_left_vectors(m, ranks[idx]);
    const Matrix u = orthogonal_procrustes_into(m, n, v);
    Matrix v_hat = u.transpose() * v;
    cur = kernels::modal_product(cur, v.transpose(), mode);
    cur_hat = kernels::modal_product(cur_hat, v_hat.transpose(), mode);
    out.factors[idx] = std::move(v);
    out.factors_hat[idx] = std::move(v_hat);
  }
  double dist = frobenius_norm(cur - cur_hat);
  out.initial_distance = dist;

  if (opts.refine) {
    for (int sweep = 0; sweep < opts.max_sweeps && dist > 0.0; ++sweep) {
      const double before = dist;
      for (int mode = 1; mode <= 3; ++mode) {
        const auto idx = static_cast<std::size_t>(mode - 1);
        const Matrix psi = orthogonal_procrustes(unfold(cur, mode), unfold(cur_hat, mode));
        Tensor3 cand = kernels::modal_product(cur_hat, psi, mode);
        const double d = frobenius_norm(cur - cand);
        if (d < dist) {
          dist = d;
          cur_hat = std::move(cand);
          out.factors_hat[idx] = out.factors_hat[idx] * psi.transpose();
        }
      }
      out.sweep_distances.push_back(dist);
      if (before - dist < opts.refine_tol * before) break;
    }
  }
  out.compressed_distance = dist;
  out.w = std::move(cur);
  out.w_hat = std::move(cur_hat);
  return out;
}

}  // namespace

PairCompression procrustes_pair_compress(const Tensor3& w, const Tensor3& w_hat, Ranks ranks,
                                         const PairCompressOptions& opts) {
  if (w.dims() != w_hat.dims()) throw DimensionError("procrustes_pair_compress: tensors differ in size");
  for (int mode = 1; mode <= 3; ++mode) {
    const Index r = ranks[static_cast<std::size_t>(mode - 1)];
    if (r < 1 || r > w.dim(mode)) throw DimensionError("procrustes_pair_compress: invalid target rank");
  }
  const auto mr = multilinear_rank(w, opts.rank_tol);
  const auto mr_hat = multilinear_rank(w_hat, opts.rank_tol);
  for (std::size_t i = 0; i < 3; ++i) {
    if (mr[i] > ranks[i] || mr_hat[i] > ranks[i])
      throw PreconditionError("procrustes_pair_compress: multilinear ranks " + ranks_string(mr) + " and " +
                              ranks_string(mr_hat) + " exceed target " + ranks_string(ranks));
  }

  const double original = frobenius_norm(w - w_hat);
  PairCompression best;
  for (int first = 1; first <= 3; ++first) {
    PairCompression cand = pair_compress_from(w, w_hat, ranks, opts, first);
    if (first == 1 || cand.compressed_distance < best.compressed_distance) best = std::move(cand);
    if (best.compressed_distance == 0.0) break;
  }
  best.original_distance = original;
  return best;
}

void save_compression(const std::filesystem::path& dir, const Compression& c) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "manifest.txt");
    if (!os) throw std::runtime_error("save_compression: cannot write " + (dir / "manifest.txt").string());
    const Dims& cd = c.core.dims();
    os << "compression," << cd[0] << "," << cd[1] << "," << cd[2] << "\n";
    os << "original," << c.factors[0].rows() << "," << c.factors[1].rows() << "," << c.factors[2].rows() << "\n";
    os << "residual," << io::format_double(c.residual) << "\n";
    os << "core,core.txt\nfactor,V1.txt\nfactor,V2.txt\nfactor,V3.txt\n";
  }
  io::save_tensor(dir / "core.txt", c.core);
  for (int i = 0; i < 3; ++i)
    io::save_matrix(dir / ("V" + std::to_string(i + 1) + ".txt"), c.factors[static_cast<std::size_t>(i)]);
}

Compression load_compression(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.txt");
  if (!is) throw ParseError("load_compression: missing manifest in " + dir.string());
  Compression c;
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("residual,", 0) == 0) {
      try {
        c.residual = std::stod(line.substr(9));
      } catch (const std::exception&) {
        throw ParseError("load_compression: bad residual line '" + line + "'");
      }
    }
  }
  c.core = io::load_tensor(dir / "core.txt");
  for (int i = 0; i < 3; ++i) {
    auto idx = static_cast<std::size_t>(i);
    c.factors[idx] = io::load_matrix(dir / ("V" + std::to_string(i + 1) + ".txt"));
    if (c.factors[idx].cols() != c.core.dim(i + 1))
      throw ParseError("load_compression: factor V" + std::to_string(i + 1) + " does not match the core");
  }
  return c;
}

}  // namespace jgecert
