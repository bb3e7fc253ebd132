#include "subcol/synthdata.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace subcol {

LabeledDataset gen_two_parabolas(int n_per, double noise_sd, uint64_t seed) {
  if (n_per < 1) throw ValidationError("gen_two_parabolas: n_per must be >= 1");
  if (noise_sd < 0.0) throw ValidationError("gen_two_parabolas: noise_sd must be >= 0");
  Rng rng(seed);
  LabeledDataset ds;
  ds.x = Matrix(2, 2 * n_per);
  ds.labels.resize(2 * n_per);
  for (int c = 0; c < 2; ++c) {
    for (int j = 0; j < n_per; ++j) {
      double t = rng.uniform(-1.0, 1.0);
      int col = c * n_per + j;
      ds.x(0, col) = t;
      ds.x(1, col) = c == 0 ? t * t : 1.0 - t * t;
      ds.labels[col] = c;
    }
  }
  if (noise_sd > 0.0)
    for (double& v : ds.x.data) v += noise_sd * rng.normal();
  ds.description = "two parabolas, " + std::to_string(2 * n_per) + " points";
  return ds;
}

namespace {

// Orthonormal basis of a random sub_dim-dimensional subspace.
Matrix random_basis(int ambient, int dim, Rng& rng) {
  Matrix g = random_gaussian(ambient, dim, rng);
  // modified Gram-Schmidt
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < j; ++k) {
      double proj = 0.0;
      for (int i = 0; i < ambient; ++i) proj += g(i, k) * g(i, j);
      for (int i = 0; i < ambient; ++i) g(i, j) -= proj * g(i, k);
    }
    double nrm = std::sqrt(col_norm_sq(g, j));
    if (nrm < 1e-12) throw NumericalError("random_basis: degenerate draw");
    for (int i = 0; i < ambient; ++i) g(i, j) /= nrm;
  }
  return g;
}

// Smallest principal angle between the spans of two orthonormal bases.
double min_principal_angle(const Matrix& u, const Matrix& v) {
  Matrix m = matmul_tn(u, v);
  double smax = svd(m).s[0];
  smax = std::min(1.0, std::max(-1.0, smax));
  return std::acos(smax);
}

}  // namespace

LabeledDataset gen_union_subspaces(int ambient_d, int sub_dim, int k, int n_per,
                                   double angle_min_deg, double noise_sd, uint64_t seed) {
  if (sub_dim >= ambient_d)
    throw ValidationError("gen_union_subspaces: sub_dim must be below ambient_d");
  if (sub_dim < 1 || k < 1 || n_per < 1)
    throw ValidationError("gen_union_subspaces: counts must be positive");
  if (noise_sd < 0.0) throw ValidationError("gen_union_subspaces: noise_sd must be >= 0");

  Rng rng(seed);
  const double angle_min = angle_min_deg * 3.14159265358979323846 / 180.0;
  std::vector<Matrix> bases;
  const int kMaxTries = 10000;
  int tries = 0;
  while (static_cast<int>(bases.size()) < k) {
    if (++tries > kMaxTries)
      throw NumericalError(
          "gen_union_subspaces: rejection sampling exceeded retry cap; "
          "try a smaller angle_min_deg");
    Matrix cand = random_basis(ambient_d, sub_dim, rng);
    bool ok = true;
    for (const Matrix& b : bases)
      if (min_principal_angle(cand, b) < angle_min) ok = false;
    if (ok) bases.push_back(std::move(cand));
  }

  LabeledDataset ds;
  ds.x = Matrix(ambient_d, k * n_per);
  ds.labels.resize(static_cast<size_t>(k) * n_per);
  for (int c = 0; c < k; ++c) {
    for (int j = 0; j < n_per; ++j) {
      Matrix coef = random_gaussian(sub_dim, 1, rng);
      Matrix pt = bases[c] * coef;
      double nrm = frob_norm(pt);
      if (nrm < 1e-12) {
        pt = get_col(bases[c], 0);
        nrm = 1.0;
      }
      int col = c * n_per + j;
      for (int i = 0; i < ambient_d; ++i) ds.x(i, col) = pt(i, 0) / nrm;
      ds.labels[col] = c;
    }
  }
  if (noise_sd > 0.0)
    for (double& v : ds.x.data) v += noise_sd * rng.normal();
  ds.description = "union of " + std::to_string(k) + " subspaces";
  return ds;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_stream(std::ostream& os, const Matrix& m) {
  os << m.rows << "," << m.cols << "\n";
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      if (j) os << ",";
      os << format_double(m(i, j));
    }
    os << "\n";
  }
}

namespace {

double parse_double(const std::string& tok) {
  errno = 0;
  const char* begin = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || end != begin + tok.size())
    throw IoError(IoError::Kind::BadToken, "unparsable value: '" + tok + "'");
  if (errno == ERANGE || !std::isfinite(v))
    throw IoError(IoError::Kind::BadToken, "value out of range: '" + tok + "'");
  return v;
}

long parse_count(const std::string& tok) {
  errno = 0;
  const char* begin = tok.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || end != begin + tok.size() || errno == ERANGE || v < 0)
    throw IoError(IoError::Kind::BadHeader, "bad dimension: '" + tok + "'");
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Matrix read_matrix_stream(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError(IoError::Kind::BadHeader, "missing header line");
  auto hdr = split_csv(line);
  if (hdr.size() != 2)
    throw IoError(IoError::Kind::BadHeader, "header must be 'rows,cols', got '" + line + "'");
  long rows = parse_count(hdr[0]);
  long cols = parse_count(hdr[1]);
  Matrix m(static_cast<int>(rows), static_cast<int>(cols));
  for (long i = 0; i < rows; ++i) {
    if (!std::getline(is, line))
      throw IoError(IoError::Kind::CountMismatch,
                    "expected " + std::to_string(rows) + " rows, got " + std::to_string(i));
    auto toks = split_csv(line);
    if (static_cast<long>(toks.size()) != cols)
      throw IoError(IoError::Kind::CountMismatch,
                    "row " + std::to_string(i) + ": expected " + std::to_string(cols) +
                        " values, got " + std::to_string(toks.size()));
    for (long j = 0; j < cols; ++j) m(static_cast<int>(i), static_cast<int>(j)) = parse_double(toks[j]);
  }
  return m;
}

void write_matrix(const std::string& path, const Matrix& m) {
  std::ofstream os(path);
  if (!os) throw IoError(IoError::Kind::OpenFailed, "cannot open for write: " + path);
  write_matrix_stream(os, m);
  os.flush();
  if (!os) throw IoError(IoError::Kind::OpenFailed, "write failed: " + path);
}

Matrix read_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(IoError::Kind::OpenFailed, "cannot open for read: " + path);
  return read_matrix_stream(is);
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream os(path);
  if (!os) throw IoError(IoError::Kind::OpenFailed, "cannot open for write: " + path);
  for (int v : labels) os << v << "\n";
  os.flush();
  if (!os) throw IoError(IoError::Kind::OpenFailed, "write failed: " + path);
}

std::vector<int> read_labels(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(IoError::Kind::OpenFailed, "cannot open for read: " + path);
  std::vector<int> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    auto toks = split_csv(line);
    if (toks.size() != 1) throw IoError(IoError::Kind::BadToken, "label line: '" + line + "'");
    out.push_back(static_cast<int>(parse_count(toks[0])));
  }
  return out;
}

}  // namespace subcol
