#include "semibayes/dataset.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "semibayes/common.hpp"

namespace semibayes {

void Dataset::validate(std::optional<double> bound_L) const {
  if (X.rows() < 1 || X.cols() < 1) throw invalid_input("dataset: need n >= 1 and p >= 1");
  if (y.size() != X.rows()) throw invalid_input("dataset: y length != number of rows of X");
  if (!X.allFinite() || !y.allFinite()) throw invalid_input("dataset: non-finite entries");
  if (bound_L && max_abs_entry() > *bound_L)
    throw invalid_input("dataset: design entries exceed declared bound L");
  if (truth && truth->theta0.dim() != p())
    throw invalid_input("dataset: truth theta0 dim != p");
}

Eigen::VectorXd Dataset::residuals(const SparseVector& theta) const {
  if (theta.dim() != p()) throw invalid_input("residuals: theta dim != p");
  Eigen::VectorXd r = y;
  for (int k = 0; k < theta.nnz(); ++k)
    r -= theta.values()[static_cast<std::size_t>(k)] *
         X.col(theta.support()[static_cast<std::size_t>(k)]);
  return r;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, int row, const std::string& col) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v))
    throw invalid_input("CSV: bad numeric value '" + s + "' in column " + col + ", data row " +
                        std::to_string(row));
  return v;
}

}  // namespace

Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open data file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw invalid_input("CSV: empty file: " + path);
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "y")
    throw invalid_input("CSV: missing required column 'y' (first header column must be y)");
  const int p = static_cast<int>(header.size()) - 1;
  if (p < 1) throw invalid_input("CSV: no predictor columns after y");

  std::vector<std::vector<double>> rows;
  int rowno = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rowno;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != p + 1)
      throw invalid_input("CSV: row " + std::to_string(rowno) + " has " +
                          std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(p + 1));
    std::vector<double> vals(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j)
      vals[j] = parse_double(cells[j], rowno, header[j]);
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw invalid_input("CSV: no data rows in " + path);

  Dataset d;
  d.X.resize(static_cast<Eigen::Index>(rows.size()), p);
  d.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.y[static_cast<Eigen::Index>(i)] = rows[i][0];
    for (int j = 0; j < p; ++j)
      d.X(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j) + 1];
  }
  d.validate();
  return d;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw invalid_input("cannot open for writing: " + path);
  out << "y";
  for (int j = 1; j <= data.p(); ++j) out << ",x" << j;
  out << "\n";
  out.precision(17);
  for (int i = 0; i < data.n(); ++i) {
    out << data.y[i];
    for (int j = 0; j < data.p(); ++j) out << "," << data.X(i, j);
    out << "\n";
  }
}

Truth truth_from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("truth JSON parse error: ") + e.what());
  }
  try {
    const auto& t = j.at("theta0");
    SparseVector theta0(t.at("dim").get<int>(), t.at("support").get<std::vector<int>>(),
                        t.at("values").get<std::vector<double>>());
    auto eta0 = SymmetricNormalMixture::from_json_string(j.at("eta0").dump());
    return Truth{std::move(theta0), std::move(eta0)};
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("truth JSON: ") + e.what());
  }
}

std::string truth_to_json_string(const Truth& truth) {
  nlohmann::json j;
  j["theta0"] = {{"dim", truth.theta0.dim()},
                 {"support", truth.theta0.support()},
                 {"values", truth.theta0.values()}};
  j["eta0"] = nlohmann::json::parse(truth.eta0.to_json_string());
  return j.dump();
}

}  // namespace semibayes
