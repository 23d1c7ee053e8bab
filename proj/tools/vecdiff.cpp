// Copyright 2026 The vecdiff Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// vecdiff: command-line front end.
//
// Exit codes: 0 ok, 1 check failure, 2 usage/parse, 3 shape, 4 domain,
// 5 unsupported order.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vecdiff/calculus.hpp"
#include "vecdiff/document.hpp"
#include "vecdiff/gaussian.hpp"
#include "vecdiff/selfcheck.hpp"
#include "vecdiff/symmetrizer.hpp"

namespace {

using namespace vecdiff;

enum Exit : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kShape = 3, kDomain = 4, kUnsupported = 5 };

std::string read_source(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const VectorDocument& doc, const std::string& format) {
  std::cout << (format == "csv" ? print_csv(doc) : print_json(doc));
}

// ---------------------------------------------------------------------------

struct SymmetrizerArgs {
  std::size_t d = 0;
  std::size_t r = 0;
  std::string apply;
  bool materialize = false;
  std::string format = "json";
};

int run_symmetrizer(const SymmetrizerArgs& a) {
  VectorDocument doc;
  doc.kind = DocKind::Symmetrizer;
  doc.dims = {a.d, 1, a.r};
  if (a.materialize) {
    const SparseMatrix s = materialize_symmetrizer(a.d, a.r);
    for (const auto& t : s.entries) {
      doc.data.push_back(static_cast<double>(t.row + 1));
      doc.data.push_back(static_cast<double>(t.col + 1));
      doc.data.push_back(t.value);
    }
    doc.meta = {{"form", "triplets"}, {"index_base", 1}, {"rows", s.rows}, {"cols", s.cols}};
  } else {
    const ParsedInput in = parse_input(read_source(a.apply));
    doc.data = Symmetrizer(a.d, a.r).apply(in.numbers);
    doc.meta = {{"form", "vector"}};
  }
  emit(doc, a.format);
  return kOk;
}

// ---------------------------------------------------------------------------

struct GaussianArgs {
  std::size_t d = 0;
  std::size_t r = 0;
  std::string x;
  std::string sigma;
  std::string path = "hermite";
  bool polynomial = false;
  std::string format = "json";
};

int run_gaussian(const GaussianArgs& a) {
  const Vec x = a.x.empty() ? Vec(a.d, 0.0) : parse_csv_numbers(a.x);
  if (x.size() != a.d) throw ShapeError("--x has " + std::to_string(x.size()) + " entries, d is " +
                                        std::to_string(a.d));
  Mat s = Mat::identity(a.d);
  if (!a.sigma.empty()) {
    const ParsedInput in = parse_input(read_source(a.sigma));
    if (in.numbers.size() != a.d * a.d)
      throw ShapeError("sigma needs d*d = " + std::to_string(a.d * a.d) + " values");
    s = Mat(a.d, a.d, in.numbers);
  }
  const SpdMatrix sigma(s);

  VectorDocument doc;
  doc.dims = {a.d, 1, a.r};
  doc.point = x;
  if (a.polynomial) {
    doc.kind = DocKind::Hermite;
    doc.data = hermite_vector(a.r, x, sigma);
    doc.meta = {{"quantity", "hermite_polynomial"}};
    emit(doc, a.format);
    return kOk;
  }

  doc.kind = DocKind::Deriv;
  doc.meta = {{"path", a.path}, {"quantity", a.r == 0 ? "density" : "density_derivative"}};
  if (a.path == "hermite") {
    doc.data = gaussian_deriv_hermite(a.r, x, sigma).data;
  } else if (a.path == "fdb") {
    doc.data = gaussian_deriv_fdb(a.r, x, sigma).data;
  } else if (a.path == "iterative") {
    doc.data = gaussian_deriv_iterative(a.r, x, sigma).data;
  } else {
    std::map<std::string, Vec> results{{"hermite", gaussian_deriv_hermite(a.r, x, sigma).data},
                                       {"fdb", gaussian_deriv_fdb(a.r, x, sigma).data}};
    if (a.r <= 3) results.emplace("iterative", gaussian_deriv_iterative(a.r, x, sigma).data);
    double worst = 0.0;
    for (auto i = results.begin(); i != results.end(); ++i)
      for (auto j = std::next(i); j != results.end(); ++j)
        worst = std::max(worst, max_abs_diff(i->second, j->second));
    const double scale = max_abs(results["hermite"]);
    doc.data = results["hermite"];
    nlohmann::json paths = nlohmann::json::array();
    for (const auto& [name, _] : results) paths.push_back(name);
    doc.meta["paths_compared"] = paths;
    doc.meta["max_pairwise_deviation"] = worst;
    doc.meta["max_pairwise_relative_deviation"] = scale > 0 ? worst / scale : worst;
    std::cerr << "max pairwise deviation: " << worst << "\n";
  }
  emit(doc, a.format);
  return kOk;
}

// ---------------------------------------------------------------------------

struct IndexArgs {
  std::size_t d = 0;
  std::size_t r = 0;
  std::string to_pos;
  std::size_t to_multi = 0;
  std::string format = "json";
};

int run_index(const IndexArgs& a) {
  MultiIndex mi;
  std::size_t pos = 0;
  if (!a.to_pos.empty()) {
    mi.d = a.d;
    for (double v : parse_csv_numbers(a.to_pos)) {
      if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v)))
        throw RangeError("indices must be positive integers");
      mi.indices.push_back(static_cast<std::size_t>(v));
    }
    if (a.r != 0 && a.r != mi.order())
      throw RangeError("--r is " + std::to_string(a.r) + " but " + std::to_string(mi.order()) +
                       " indices were given");
    pos = position_of(mi);
  } else {
    if (a.r == 0) throw RangeError("--to-multi needs --r >= 1");
    pos = a.to_multi;
    mi = indices_of(pos, a.d, a.r);
  }

  std::vector<std::size_t> canon = mi.indices;
  std::sort(canon.begin(), canon.end());
  std::uint64_t orbit = factorial(canon.size());
  for (auto it = canon.begin(); it != canon.end();) {
    const auto next = std::find_if(it, canon.end(), [&](std::size_t v) { return v != *it; });
    orbit /= factorial(static_cast<std::uint64_t>(next - it));
    it = next;
  }

  VectorDocument doc;
  doc.kind = DocKind::Index;
  doc.dims = {a.d, 1, mi.order()};
  doc.data.push_back(static_cast<double>(pos));
  for (std::size_t i : mi.indices) doc.data.push_back(static_cast<double>(i));
  doc.meta = {{"direction", a.to_pos.empty() ? "to-multi" : "to-pos"},
              {"position", pos},
              {"indices", mi.indices},
              {"canonical", canon},
              {"canonical_position", position_of(MultiIndex{a.d, canon})},
              {"orbit_size", orbit}};
  emit(doc, a.format);
  return kOk;
}

// ---------------------------------------------------------------------------

struct MomentsArgs {
  std::string direction;
  std::string input;
  std::size_t r = 0;
  std::size_t d = 0;
  bool pad_zero = false;
  std::string format = "json";
};

// Splits concatenated orders 1..R of length d + d^2 + ... + d^R.
std::vector<Vec> split_orders(const Vec& data, std::size_t d) {
  std::vector<Vec> out;
  std::size_t offset = 0;
  for (std::size_t l = 1; offset < data.size(); ++l) {
    const std::size_t n = checked_pow(d, l);
    if (offset + n > data.size())
      throw ShapeError("input length is not d + d^2 + ... for d = " + std::to_string(d));
    out.emplace_back(data.begin() + static_cast<std::ptrdiff_t>(offset),
                     data.begin() + static_cast<std::ptrdiff_t>(offset + n));
    offset += n;
  }
  return out;
}

int run_moments(const MomentsArgs& a) {
  const bool k2m = a.direction == "k2m";
  const ParsedInput in = parse_input(read_source(a.input));
  std::size_t d = a.d;
  if (in.document) {
    const DocKind want = k2m ? DocKind::Cumulants : DocKind::Moments;
    if (in.document->kind != want)
      throw ShapeError("--direction " + a.direction + " expects a " + std::string(to_string(want)) +
                       " document");
    if (d != 0 && d != in.document->dims.d) throw ShapeError("--d disagrees with the document");
    d = in.document->dims.d;
  }
  if (d == 0) throw ShapeError("bare numeric input needs --d");

  std::vector<Vec> orders = split_orders(in.numbers, d);
  if (orders.size() < a.r) {
    if (!a.pad_zero)
      throw MissingOrder("input supplies orders up to " + std::to_string(orders.size()) +
                         ", order " + std::to_string(a.r) + " requested");
    for (std::size_t l = orders.size() + 1; l <= a.r; ++l) orders.emplace_back(checked_pow(d, l), 0.0);
  }
  orders.resize(a.r);

  VectorDocument doc;
  doc.kind = k2m ? DocKind::Moments : DocKind::Cumulants;
  doc.dims = {d, 1, a.r};
  double roundtrip = 0.0;
  if (k2m) {
    const CumulantSet kappa(d, orders);
    const MomentSet mu = to_moments(kappa);
    const CumulantSet back = to_cumulants(mu);
    for (std::size_t l = 1; l <= a.r; ++l) {
      doc.data.insert(doc.data.end(), mu.order(l).begin(), mu.order(l).end());
      roundtrip = std::max(roundtrip, max_abs_diff(back.order(l), kappa.order(l)));
    }
  } else {
    const MomentSet mu(d, orders);
    const CumulantSet kappa = to_cumulants(mu);
    const MomentSet back = to_moments(kappa);
    for (std::size_t l = 1; l <= a.r; ++l) {
      doc.data.insert(doc.data.end(), kappa.order(l).begin(), kappa.order(l).end());
      roundtrip = std::max(roundtrip, max_abs_diff(back.order(l), mu.order(l)));
    }
  }
  doc.meta = {{"direction", a.direction}, {"roundtrip_max_error", roundtrip}};
  emit(doc, a.format);
  return kOk;
}

// ---------------------------------------------------------------------------

int run_selfcheck_cmd(const std::string& suite, std::uint64_t seed) {
  const SelfCheckReport report = run_selfcheck(suite, seed);
  std::cout << report.to_json().dump(2) << "\n";
  if (!report.passed()) {
    for (const auto& name : report.failures()) std::cerr << "FAILED: " << name << "\n";
    return kCheckFailed;
  }
  return kOk;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Vectorized higher-order derivatives: symmetrizers, Gaussian derivatives, "
               "index maps, moment/cumulant conversion and self-checks"};
  app.require_subcommand(1);
  const std::vector<std::string> formats{"json", "csv"};

  SymmetrizerArgs sym;
  auto* cs = app.add_subcommand("symmetrizer", "Apply or materialize S_{d,r}");
  cs->add_option("--d", sym.d, "Dimension")->required()->check(CLI::PositiveNumber);
  cs->add_option("--r", sym.r, "Order")->required();
  auto* apply = cs->add_option("--apply", sym.apply, "Input vector (JSON document, JSON array or CSV; '-' for stdin)");
  auto* mat = cs->add_flag("--materialize", sym.materialize, "Print (row, col, value) triplets, 1-based");
  apply->excludes(mat);
  cs->add_option("--format", sym.format)->check(CLI::IsMember(formats));

  GaussianArgs g;
  auto* cg = app.add_subcommand("gaussian", "Derivatives of the N(0, Sigma) density");
  cg->add_option("--d", g.d, "Dimension")->required()->check(CLI::PositiveNumber);
  cg->add_option("--r", g.r, "Order")->required();
  cg->add_option("--x", g.x, "Point as a comma list, e.g. --x=-0.5,1 (default 0)");
  cg->add_option("--sigma", g.sigma, "d*d covariance entries, column-major ('-' for stdin; default I)");
  cg->add_option("--path", g.path, "hermite | fdb | iterative | all")
      ->check(CLI::IsMember({"hermite", "fdb", "iterative", "all"}));
  cg->add_flag("--polynomial", g.polynomial, "Print the Hermite polynomial vector H_r(x; Sigma)");
  cg->add_option("--format", g.format)->check(CLI::IsMember(formats));

  IndexArgs ix;
  auto* ci = app.add_subcommand("index", "Convert between positions and multi-indices (1-based)");
  ci->add_option("--d", ix.d, "Dimension")->required()->check(CLI::PositiveNumber);
  ci->add_option("--r", ix.r, "Order");
  auto* tp = ci->add_option("--to-pos", ix.to_pos, "Multi-index i1,...,ir");
  auto* tm = ci->add_option("--to-multi", ix.to_multi, "Position");
  tp->excludes(tm);
  ci->add_option("--format", ix.format)->check(CLI::IsMember(formats));

  MomentsArgs mo;
  auto* cm = app.add_subcommand("moments", "Convert cumulants to moments (k2m) or back (m2k)");
  cm->add_option("--direction", mo.direction)->required()->check(CLI::IsMember({"k2m", "m2k"}));
  cm->add_option("--input", mo.input, "Concatenated orders 1..R ('-' for stdin)")->required();
  cm->add_option("--r", mo.r, "Highest order to convert")->required()->check(CLI::PositiveNumber);
  cm->add_option("--d", mo.d, "Dimension (needed for bare numeric input)");
  cm->add_flag("--pad-zero", mo.pad_zero, "Treat orders missing from the input as zero");
  cm->add_option("--format", mo.format)->check(CLI::IsMember(formats));

  std::string suite = "all";
  std::uint64_t seed = 0;
  auto* cc = app.add_subcommand("selfcheck", "Run invariant suites; exit 1 on failure");
  cc->add_option("--suite", suite, "all | symmetrizer | gaussian | fdb | taylor");
  cc->add_option("--seed", seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (cs->parsed()) {
    if (sym.apply.empty() == !sym.materialize) throw ParseError("give exactly one of --apply and --materialize");
    return run_symmetrizer(sym);
  }
  if (cg->parsed()) return run_gaussian(g);
  if (ci->parsed()) {
    if (ix.to_pos.empty() == (tm->count() == 0)) throw ParseError("give exactly one of --to-pos and --to-multi");
    return run_index(ix);
  }
  if (cm->parsed()) return run_moments(mo);
  if (std::find(kSuiteNames.begin(), kSuiteNames.end(), suite) == kSuiteNames.end())
    throw ParseError("unknown suite '" + suite + "'");
  return run_selfcheck_cmd(suite, seed);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const RangeError& e) {
    std::cerr << "range error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnknownKind& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnsupportedOrder& e) {
    std::cerr << "unsupported order: " << e.what() << "\n";
    return kUnsupported;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const ShapeError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return kShape;
  } catch (const MissingOrder& e) {
    std::cerr << "missing order: " << e.what() << "\n";
    return kShape;
  } catch (const SizeOverflow& e) {
    std::cerr << "size error: " << e.what() << "\n";
    return kShape;
  } catch (const NonSymmetricInput& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return kShape;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
}
