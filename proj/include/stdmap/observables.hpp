#pragma once

// x-dependent observables, stored as trigonometric polynomials
// a_0 + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stdmap/core_maps.hpp"
#include "stdmap/errors.hpp"

namespace stdmap {

struct FourierMode {
  int k = 0;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

class Observable {
 public:
  Observable() = default;
  Observable(std::string name, double constant, std::vector<FourierMode> modes)
      : name_(std::move(name)), constant_(constant), modes_(std::move(modes)) {
    for (const auto& m : modes_) {
      if (m.k <= 0) throw InvalidArgument("Fourier mode index must be positive");
    }
  }

  static Observable constant(double c) { return {"const:" + std::to_string(c), c, {}}; }
  static Observable sine(int k = 1) { return {k == 1 ? "sin" : "fourier:" + std::to_string(k), 0.0, {{k, 0.0, 1.0}}}; }
  static Observable cosine(int k = 1) { return {k == 1 ? "cos" : "cosine:" + std::to_string(k), 0.0, {{k, 1.0, 0.0}}}; }

  // Text file of lines "k a_k b_k"; k = 0 sets the constant term. '#' starts a comment.
  static Observable from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open observable file " + path);
    double c0 = 0.0;
    std::vector<FourierMode> modes;
    std::string line;
    while (std::getline(in, line)) {
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      std::istringstream ls(line);
      int k = 0;
      double a = 0.0, b = 0.0;
      if (!(ls >> k)) continue;
      if (!(ls >> a >> b)) throw InvalidArgument("malformed observable line: " + line);
      if (k == 0) {
        c0 += a;
      } else {
        modes.push_back({k, a, b});
      }
    }
    return {"file:" + path, c0, std::move(modes)};
  }

  // sin | cos | fourier:k | cosine:k | file:path | const:c
  static Observable parse(const std::string& spec) {
    if (spec == "sin") return sine();
    if (spec == "cos") return cosine();
    auto tail = [&](const char* prefix) -> std::string {
      const std::string p(prefix);
      return spec.rfind(p, 0) == 0 ? spec.substr(p.size()) : std::string();
    };
    try {
      if (auto t = tail("fourier:"); !t.empty()) return sine(std::stoi(t));
      if (auto t = tail("cosine:"); !t.empty()) return cosine(std::stoi(t));
      if (auto t = tail("const:"); !t.empty()) return constant(std::stod(t));
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad observable spec: " + spec);
    }
    if (auto t = tail("file:"); !t.empty()) return from_file(t);
    throw InvalidArgument("unknown observable: " + spec);
  }

  [[nodiscard]] double operator()(double x) const {
    double v = constant_;
    for (const auto& m : modes_) {
      const double t = kTwoPi * numeric::frac(static_cast<double>(m.k) * x);
      if (m.cos_coeff != 0.0) v += m.cos_coeff * std::cos(t);
      if (m.sin_coeff != 0.0) v += m.sin_coeff * std::sin(t);
    }
    return v;
  }

  [[nodiscard]] double sup_norm_bound() const {
    double s = std::fabs(constant_);
    for (const auto& m : modes_) s += std::fabs(m.cos_coeff) + std::fabs(m.sin_coeff);
    return s;
  }

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] double constant_term() const { return constant_; }
  [[nodiscard]] const std::vector<FourierMode>& modes() const { return modes_; }
  [[nodiscard]] int max_frequency() const {
    int k = 0;
    for (const auto& m : modes_) k = std::max(k, m.k);
    return k;
  }

 private:
  std::string name_ = "zero";
  double constant_ = 0.0;
  std::vector<FourierMode> modes_;
};

}  // namespace stdmap
