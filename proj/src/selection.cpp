#include "carve/selection.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "carve/errors.hpp"

namespace carve {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data() + (s[0] == '+' ? 1 : 0);
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

double soft_threshold(double z, double lam) {
  if (z > lam) return z - lam;
  if (z < -lam) return z + lam;
  return 0.0;
}

Matrix select_columns(const Matrix& X, const std::vector<int>& idx) {
  Matrix out(X.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(k) = X.col(idx[k]);
  return out;
}

// (X_M' X_M)^-1 X_M', checking the rank of X_M.
Matrix ols_contrasts(const Matrix& XM) {
  if (XM.cols() == 0) return Matrix(0, XM.rows());
  Eigen::ColPivHouseholderQR<Matrix> qr(XM);
  qr.setThreshold(1e-10);
  if (qr.rank() < XM.cols()) {
    std::ostringstream os;
    os << "selected design has rank " << qr.rank() << " < " << XM.cols();
    throw RankError(os.str());
  }
  const Matrix gram = XM.transpose() * XM;
  return gram.ldlt().solve(XM.transpose());
}

}  // namespace

Matrix read_matrix_csv(const std::filesystem::path& path,
                       std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0, width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t j = 0; j < fields.size() && numeric; ++j) {
      numeric = parse_double(fields[j], row[j]) && !std::isnan(row[j]);
    }
    if (first && !numeric) {
      first = false;
      width = fields.size();
      if (header) *header = fields;
      continue;
    }
    first = false;
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      std::ostringstream os;
      os << path.string() << ": row " << line_no << " has " << fields.size()
         << " fields, expected " << width;
      throw IoError(os.str());
    }
    if (!numeric) {
      for (std::size_t j = 0; j < fields.size(); ++j) {
        double v;
        if (!parse_double(fields[j], v) || std::isnan(v)) {
          std::ostringstream os;
          os << path.string() << ": row " << line_no << ", column " << j + 1
             << ": missing or non-numeric value '" << fields[j] << "'";
          throw IoError(os.str());
        }
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path.string() + ": no data rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(17);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  if (!header.empty()) out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

Matrix center_columns(const Matrix& X) {
  return X.rowwise() - X.colwise().mean();
}

Vector center(const Vector& y) {
  return y.array() - y.mean();
}

Matrix standardize_columns(const Matrix& X) {
  Matrix Z = center_columns(X);
  const double n = static_cast<double>(X.rows());
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    const double s = Z.col(j).norm() / std::sqrt(n);
    if (!(s > 0.0)) throw RankError("standardize_columns: constant column");
    Z.col(j) /= s;
  }
  return Z;
}

double lambda_max(const Matrix& X, const Vector& y) {
  return (X.transpose() * y).cwiseAbs().maxCoeff() / static_cast<double>(X.rows());
}

LassoFit lasso_fit(const Matrix& X, const Vector& y, double lam, const LassoOptions& opt) {
  if (X.rows() != y.size()) throw ConfigError("lasso_fit: X and y disagree in rows");
  if (!(lam > 0.0)) throw DomainError("lasso_fit: lam must be positive");
  const double n = static_cast<double>(X.rows());
  const Eigen::Index p = X.cols();
  const Vector scale = X.colwise().squaredNorm().transpose() / n;
  LassoFit fit;
  fit.beta = Vector::Zero(p);
  Vector r = y;
  for (fit.sweeps = 1; fit.sweeps <= opt.max_sweeps; ++fit.sweeps) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (scale[j] == 0.0) continue;
      const double old = fit.beta[j];
      const double z = X.col(j).dot(r) / n + scale[j] * old;
      const double upd = soft_threshold(z, lam) / scale[j];
      if (upd != old) {
        r.noalias() -= (upd - old) * X.col(j);
        fit.beta[j] = upd;
        max_change = std::max(max_change, std::abs(upd - old));
      }
    }
    if (max_change < opt.tol) return fit;
  }
  throw ConvergenceError("lasso_fit: no convergence within the sweep budget",
                         std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN());
}

bool contains(const PolyhedralEvent& e, const Vector& y, double slack) {
  if (e.A.rows() == 0) return true;
  return ((e.A * y - e.b).array() <= slack).all();
}

void write_event_csv(const std::filesystem::path& dir, const PolyhedralEvent& e) {
  std::filesystem::create_directories(dir);
  write_matrix_csv(dir / "A.csv", e.A);
  write_matrix_csv(dir / "b.csv", e.b);
}

SelectionOutcome lasso_outcome(const Matrix& X, const Vector& beta) {
  SelectionOutcome out;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) {
      out.M.push_back(static_cast<int>(j));
      out.signs.push_back(beta[j] > 0.0 ? 1 : -1);
    }
  }
  out.eta = ols_contrasts(select_columns(X, out.M));
  return out;
}

PolyhedralEvent lasso_event(const Matrix& X, const Vector& y, double lam,
                            const SelectionOutcome& outcome) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (y.size() != n) throw ConfigError("lasso_event: X and y disagree in rows");
  const double nlam = static_cast<double>(n) * lam;
  const auto m = static_cast<Eigen::Index>(outcome.M.size());
  std::vector<int> inactive;
  for (int j = 0, k = 0; j < p; ++j) {
    if (k < m && outcome.M[k] == j) {
      ++k;
    } else {
      inactive.push_back(j);
    }
  }
  const Matrix XM = select_columns(X, outcome.M);
  const Matrix XI = select_columns(X, inactive);
  const Matrix pinv = m > 0 ? ols_contrasts(XM) : Matrix(0, n);
  Vector s(m);
  for (Eigen::Index k = 0; k < m; ++k) s[k] = outcome.signs[k];

  PolyhedralEvent e;
  const Eigen::Index q = static_cast<Eigen::Index>(inactive.size());
  e.A.resize(m + 2 * q, n);
  e.b.resize(m + 2 * q);
  if (m > 0) {
    const Matrix gram_inv = (XM.transpose() * XM).ldlt().solve(Matrix::Identity(m, m));
    const Vector gs = gram_inv * s;
    e.A.topRows(m) = -(s.asDiagonal() * pinv);
    e.b.head(m) = -nlam * (s.asDiagonal() * gs);
  }
  if (q > 0) {
    // X_I' (I - P_M), with P_M = X_M pinv.
    Matrix resid = XI.transpose();
    Vector shift = Vector::Zero(q);
    if (m > 0) {
      resid -= (XI.transpose() * XM) * pinv;
      shift = XI.transpose() * (pinv.transpose() * s);
    }
    e.A.middleRows(m, q) = resid;
    e.b.segment(m, q) = nlam * (Vector::Ones(q) - shift);
    e.A.bottomRows(q) = -resid;
    e.b.tail(q) = nlam * (Vector::Ones(q) + shift);
  }
  return e;
}

std::vector<int> top_k(const Matrix& X, const Vector& y, int k) {
  if (k < 1 || k > X.cols()) throw ConfigError("marginal screening: need 1 <= k <= p");
  const Vector score = (X.transpose() * y).cwiseAbs();
  std::vector<int> idx(static_cast<std::size_t>(X.cols()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return score[a] > score[b]; });
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Screening marginal_screen_event(const Matrix& X, const Vector& y, int k) {
  if (X.rows() != y.size()) throw ConfigError("marginal screening: X and y disagree in rows");
  Screening out;
  out.outcome.M = top_k(X, y, k);
  const Vector xty = X.transpose() * y;
  std::vector<bool> selected(static_cast<std::size_t>(X.cols()), false);
  for (int j : out.outcome.M) {
    selected[j] = true;
    out.outcome.signs.push_back(xty[j] >= 0.0 ? 1 : -1);
  }
  const Eigen::Index p = X.cols(), n = X.rows();
  const Eigen::Index rows = k + 2 * k * (p - k);
  out.event.A.resize(rows, n);
  out.event.b = Vector::Zero(rows);
  Eigen::Index r = 0;
  for (int a = 0; a < k; ++a) {
    const int j = out.outcome.M[a];
    const double s = out.outcome.signs[a];
    out.event.A.row(r++) = -s * X.col(j).transpose();
    for (int l = 0; l < p; ++l) {
      if (selected[l]) continue;
      out.event.A.row(r++) = (X.col(l) - s * X.col(j)).transpose();
      out.event.A.row(r++) = (-X.col(l) - s * X.col(j)).transpose();
    }
  }
  out.outcome.eta = ols_contrasts(select_columns(X, out.outcome.M));
  return out;
}

PolyhedralEvent sample_mean_event(int n, int p, double threshold) {
  if (n < 1 || p < 1) throw ConfigError("sample_mean_event: need n, p >= 1");
  PolyhedralEvent e;
  e.A = Matrix::Zero(p, static_cast<Eigen::Index>(n) * p);
  for (int j = 0; j < p; ++j) e.A.block(j, static_cast<Eigen::Index>(j) * n, 1, n).setConstant(-1.0 / n);
  e.b = Vector::Constant(p, -threshold);
  return e;
}

TruncationBounds truncation_bounds(const PolyhedralEvent& e, const Vector& eta,
                                   double sigma2, const Vector& y) {
  if (!(sigma2 > 0.0)) throw DomainError("truncation_bounds: sigma2 must be positive");
  if (eta.size() != y.size() || (e.A.rows() > 0 && e.A.cols() != y.size()))
    throw ConfigError("truncation_bounds: dimensions disagree");
  const double ee = eta.squaredNorm();
  if (!(ee > 0.0)) throw DomainError("truncation_bounds: eta must be nonzero");
  // The sigma2 factors cancel under isotropic covariance.
  const Vector c = eta / ee;
  const double stat = eta.dot(y);
  const Vector z = y - c * stat;
  TruncationBounds tb{-kInf, kInf};
  if (e.A.rows() == 0) return tb;
  const Vector Ac = e.A * c;
  const Vector slack = e.b - e.A * z;
  const double cnorm = c.norm();
  for (Eigen::Index j = 0; j < Ac.size(); ++j) {
    if (std::abs(Ac[j]) <= 1e-12 * e.A.row(j).norm() * cnorm) continue;
    const double v = slack[j] / Ac[j];
    if (Ac[j] < 0.0) {
      tb.v_minus = std::max(tb.v_minus, v);
    } else {
      tb.v_plus = std::min(tb.v_plus, v);
    }
  }
  if (!(tb.v_minus < tb.v_plus)) {
    std::ostringstream os;
    os << "truncation_bounds: inverted bounds [" << tb.v_minus << ", " << tb.v_plus
       << "]; event and eta do not match the observation";
    throw ConsistencyError(os.str());
  }
  return tb;
}

}  // namespace carve
