#include "semibayes/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "semibayes/common.hpp"
#include "semibayes/rng.hpp"

namespace semibayes {

namespace {
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log sqrt(2*pi)
}

SymmetricNormalMixture::SymmetricNormalMixture(std::vector<MixtureAtom> atoms)
    : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw invalid_input("mixture: needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (!std::isfinite(a.z) || !std::isfinite(a.sigma) || !std::isfinite(a.w))
      throw invalid_input("mixture: non-finite atom");
    if (a.sigma <= 0.0) throw invalid_input("mixture: sigma must be positive");
    if (a.w <= 0.0) throw invalid_input("mixture: weights must be positive");
    total += a.w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw invalid_input("mixture: weights must sum to 1");
  // Mirror closure: each off-center atom needs an exact (-z, sigma, w) partner.
  std::vector<bool> used(atoms_.size(), false);
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].z == 0.0 || used[i]) continue;
    bool found = false;
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
      if (j == i || used[j]) continue;
      if (atoms_[j].z == -atoms_[i].z && atoms_[j].sigma == atoms_[i].sigma &&
          atoms_[j].w == atoms_[i].w) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) throw invalid_input("mixture: mirror closure violated");
  }
}

double SymmetricNormalMixture::pdf(double x) const { return std::exp(log_pdf(x)); }

double SymmetricNormalMixture::log_pdf(double x) const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& a : atoms_) {
    const double u = (x - a.z) / a.sigma;
    const double t = std::log(a.w) - std::log(a.sigma) - kLogSqrt2Pi - 0.5 * u * u;
    m = std::max(m, t);
  }
  double s = 0.0;
  for (const auto& a : atoms_) {
    const double u = (x - a.z) / a.sigma;
    const double t = std::log(a.w) - std::log(a.sigma) - kLogSqrt2Pi - 0.5 * u * u;
    s += std::exp(t - m);
  }
  return m + std::log(s);
}

double SymmetricNormalMixture::ell_dot(double x) const {
  // Ratios of weighted Gaussian sums, normalized by the max log term.
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& a : atoms_) {
    const double u = (x - a.z) / a.sigma;
    m = std::max(m, std::log(a.w) - std::log(a.sigma) - 0.5 * u * u);
  }
  double num = 0.0, den = 0.0;
  for (const auto& a : atoms_) {
    const double u = (x - a.z) / a.sigma;
    const double e = std::exp(std::log(a.w) - std::log(a.sigma) - 0.5 * u * u - m);
    den += e;
    num += e * (x - a.z) / (a.sigma * a.sigma);
  }
  return num / den;
}

double SymmetricNormalMixture::ell_ddot(double x) const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& a : atoms_) {
    const double u = (x - a.z) / a.sigma;
    m = std::max(m, std::log(a.w) - std::log(a.sigma) - 0.5 * u * u);
  }
  double den = 0.0, first = 0.0, second = 0.0;
  for (const auto& a : atoms_) {
    const double s2 = a.sigma * a.sigma;
    const double u = (x - a.z) / a.sigma;
    const double e = std::exp(std::log(a.w) - std::log(a.sigma) - 0.5 * u * u - m);
    den += e;
    first += e * (x - a.z) / s2;
    second += e * ((x - a.z) * (x - a.z) / (s2 * s2) - 1.0 / s2);
  }
  const double r1 = first / den;
  return second / den - r1 * r1;
}

double SymmetricNormalMixture::cdf(double x) const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.w * norm_cdf((x - a.z) / a.sigma);
  return s;
}

double SymmetricNormalMixture::tail_mass_outside(double lo, double hi) const {
  return cdf(lo) + (1.0 - cdf(hi));
}

double SymmetricNormalMixture::variance() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.w * (a.z * a.z + a.sigma * a.sigma);
  return s;
}

double SymmetricNormalMixture::max_abs_location() const {
  double m = 0.0;
  for (const auto& a : atoms_) m = std::max(m, std::abs(a.z));
  return m;
}

double SymmetricNormalMixture::max_sigma() const {
  double m = 0.0;
  for (const auto& a : atoms_) m = std::max(m, a.sigma);
  return m;
}

bool SymmetricNormalMixture::within_box(double M, double sigma1, double sigma2) const {
  for (const auto& a : atoms_)
    if (std::abs(a.z) > M || a.sigma < sigma1 || a.sigma > sigma2) return false;
  return true;
}

double SymmetricNormalMixture::sample(Rng& rng) const {
  double u = rng.uniform();
  for (const auto& a : atoms_) {
    if (u < a.w) return a.z + a.sigma * rng.normal();
    u -= a.w;
  }
  const auto& last = atoms_.back();
  return last.z + last.sigma * rng.normal();
}

std::string SymmetricNormalMixture::to_json_string() const {
  nlohmann::json j;
  j["atoms"] = nlohmann::json::array();
  for (const auto& a : atoms_)
    j["atoms"].push_back({{"z", a.z}, {"sigma", a.sigma}, {"w", a.w}});
  return j.dump();
}

SymmetricNormalMixture SymmetricNormalMixture::from_json_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("mixture JSON parse error: ") + e.what());
  }
  if (!j.contains("atoms") || !j["atoms"].is_array())
    throw invalid_input("mixture JSON: missing \"atoms\" array");
  std::vector<MixtureAtom> atoms;
  for (const auto& a : j["atoms"]) {
    MixtureAtom atom;
    try {
      atom.z = a.at("z").get<double>();
      atom.sigma = a.at("sigma").get<double>();
      atom.w = a.at("w").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw invalid_input(std::string("mixture JSON atom: ") + e.what());
    }
    atoms.push_back(atom);
  }
  return SymmetricNormalMixture(std::move(atoms));
}

}  // namespace semibayes
