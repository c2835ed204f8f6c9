// wft: command-line front end for the wavelet field-theory library.
//
// Exit codes: 0 success, 2 usage error or unsupported input, 3 regularity /
// domain / numerical failure, 4 verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "wft/conncoef.hpp"
#include "wft/errors.hpp"
#include "wft/filters.hpp"
#include "wft/format.hpp"
#include "wft/golden.hpp"
#include "wft/hamiltonian.hpp"
#include "wft/multiscale.hpp"
#include "wft/refine.hpp"

namespace {

constexpr int kUsage = 2;
constexpr int kNumeric = 3;
constexpr int kVerify = 4;

struct Config {
  wft::GammaConfig gamma;
  wft::FlowOptions flow;
  int oracle_level = 14;
};

Config load_config(const std::string& path) {
  Config c;
  c.flow.lambda_max = 0.05;
  if (path.empty()) return c;
  std::ifstream in(path);
  if (!in) throw wft::InvalidArgument("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      if (k == "J_p") c.gamma.product_depth = it->get<int>();
      else if (k == "p_max") c.gamma.p_max = it->get<double>();
      else if (k == "gamma_panel_width") c.gamma.panel_width = it->get<double>();
      else if (k == "gamma_tolerance") c.gamma.tolerance = it->get<double>();
      else if (k == "flow_rtol") c.flow.rtol = it->get<double>();
      else if (k == "flow_atol") c.flow.atol = it->get<double>();
      else if (k == "flow_lambda_max") c.flow.lambda_max = it->get<double>();
      else if (k == "flow_initial_step") c.flow.initial_step = it->get<double>();
      else if (k == "flow_target_ratio") c.flow.target_ratio = it->get<double>();
      else if (k == "oracle_level") c.oracle_level = it->get<int>();
      else throw wft::InvalidArgument("unknown config key '" + k + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw wft::InvalidArgument("config " + path + ": " + e.what());
  }
  return c;
}

std::string read_all(const std::string& path) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wft::InvalidArgument("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw wft::InvalidArgument("cannot write " + path);
  out << text;
}

// signal as one value per line or CSV; a leading non-numeric header line is skipped
std::vector<double> read_signal(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> v;
    try {
      v = wft::parse_numbers(line);
    } catch (const wft::InvalidArgument&) {
      if (first) {
        first = false;
        continue;
      }
      throw;
    }
    first = false;
    // CSV rows: the value is the last column
    if (!v.empty()) out.push_back(v.back());
  }
  return out;
}

wft::TableShape table_shape(const std::string& name) {
  if (name == "gamma") return wft::shapes::gamma_pair();
  if (name == "pair") return wft::shapes::pair_derivative();
  if (name == "triple") return wft::shapes::triple_derivative();
  if (name == "F") return wft::shapes::weighted_overlap();
  if (name == "G") return wft::shapes::weighted_derivative();
  if (name == "X") return wft::shapes::weighted_gradient();
  throw wft::InvalidArgument("unknown table '" + name + "'");
}

// kind,scale,translation,deriv,power; factors separated by ';'
std::vector<wft::OracleFactor> parse_query(const std::string& text) {
  std::vector<wft::OracleFactor> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos)
      throw wft::InvalidArgument("query factor '" + item + "' needs kind,scale,translation,deriv[,power]");
    std::string kind = item.substr(0, comma);
    kind.erase(0, kind.find_first_not_of(" \t"));
    kind.erase(kind.find_last_not_of(" \t") + 1);
    const auto nums = wft::parse_numbers(item.substr(comma + 1));
    if (nums.size() < 3 || nums.size() > 4)
      throw wft::InvalidArgument("query factor '" + item + "' needs kind,scale,translation,deriv[,power]");
    for (double v : nums)
      if (v != std::floor(v)) throw wft::InvalidArgument("query fields must be integers: " + item);
    wft::OracleFactor f;
    f.kind = wft::parse_basis_kind(kind);
    f.scale = static_cast<int>(nums[0]);
    f.translation = static_cast<long>(nums[1]);
    f.deriv = static_cast<int>(nums[2]);
    f.power = nums.size() == 4 ? static_cast<int>(nums[3]) : 0;
    out.push_back(f);
  }
  if (out.empty()) throw wft::InvalidArgument("empty query");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Daubechies wavelet connection coefficients and multiscale free-field matrices"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file overriding J_p, p_max, flow and oracle settings");

  int K = 3;
  const auto add_K = [&](CLI::App* c) { c->add_option("--K", K, "wavelet order (1, 2 or 3)"); };

  // filters
  auto* filters = app.add_subcommand("filters", "print the filter bank");
  add_K(filters);
  std::string filters_format = "json";
  bool reverse = false;
  filters->add_option("--format", filters_format)->check(CLI::IsMember({"json", "csv"}));
  filters->add_flag("--reverse", reverse, "order-reversed solution");

  // eval
  auto* eval = app.add_subcommand("eval", "sample s, w or a derivative on a dyadic grid");
  add_K(eval);
  int deriv = 0, level = 8;
  std::string kind = "scaling", out_path;
  eval->add_option("--deriv", deriv);
  eval->add_option("--level", level);
  eval->add_option("--kind", kind)->check(CLI::IsMember({"scaling", "wavelet"}));
  eval->add_option("--out", out_path);

  // conn
  auto* conn = app.add_subcommand("conn", "connection-coefficient tables");
  add_K(conn);
  std::string table = "pair", conn_format = "csv";
  bool verify = false;
  conn->add_option("--table", table)->check(CLI::IsMember({"gamma", "triple", "pair", "F", "G", "X"}));
  conn->add_option("--format", conn_format)->check(CLI::IsMember({"json", "csv"}));
  conn->add_flag("--verify", verify, "diff against the embedded reference tables");
  std::string golden_path;
  conn->add_option("--golden", golden_path, "reference CSV to use instead of the embedded copy");

  // dwt
  auto* dwt = app.add_subcommand("dwt", "periodic discrete wavelet transform");
  dwt->require_subcommand(1);
  int levels = 1;
  std::string in_path, dwt_out;
  auto* analyze = dwt->add_subcommand("analyze", "signal -> pyramid JSON");
  auto* synthesize = dwt->add_subcommand("synthesize", "pyramid JSON -> signal");
  for (auto* c : {analyze, synthesize}) {
    add_K(c);
    c->add_option("--input", in_path, "input file (default stdin)");
    c->add_option("--output", dwt_out, "output file (default stdout)");
  }
  analyze->add_option("--levels", levels);
  synthesize->add_option("--levels", levels, "ignored; taken from the pyramid");

  // ham
  auto* ham = app.add_subcommand("ham", "free-field Hamiltonian matrices");
  ham->require_subcommand(1);
  double mu = 1.0;
  int k = 0, l_max = -1;
  long N = 32, split = 16;
  std::string ham_format = "csv", variant = "wegner", ham_kind = "scaling";
  auto* blocks = ham->add_subcommand("blocks", "coupling blocks D^k, D^kl, D^jl");
  auto* spectrum = ham->add_subcommand("spectrum", "eigenvalues of D + mu^2");
  auto* gamma = ham->add_subcommand("gamma", "vacuum variances and mode normalization");
  auto* flow = ham->add_subcommand("flow", "scale-decoupling flow trajectory");
  for (auto* c : {blocks, spectrum, gamma, flow}) add_K(c);
  for (auto* c : {blocks, spectrum}) {
    c->add_option("--k", k, "coarse scale");
    c->add_option("--lmax", l_max, "finest wavelet scale (below k: coarse only)");
    c->add_option("--N", N, "periodic volume in coarse cells");
  }
  blocks->add_option("--format", ham_format)->check(CLI::IsMember({"csv", "coo"}));
  for (auto* c : {spectrum, gamma, flow}) c->add_option("--mu", mu, "mass");
  gamma->add_option("--k", k, "scale of the basis function");
  gamma->add_option("--kind", ham_kind)->check(CLI::IsMember({"scaling", "wavelet"}));
  flow->add_option("--k", k, "coarse scale");
  flow->add_option("--variant", variant)->check(CLI::IsMember({"wegner", "fixed"}));
  flow->add_option("--split", split, "coarse block size (= number of scale-k wavelets)");
  double lambda_max = -1;
  flow->add_option("--lambda-max", lambda_max);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "brute-force Riemann sum of a product integral");
  add_K(oracle);
  std::string query;
  int oracle_level = -1;
  bool exact = false;
  oracle->add_option("--query", query, "factors kind,scale,translation,deriv[,power] joined by ';'")
      ->required();
  oracle->add_option("--level", oracle_level);
  oracle->add_flag("--exact", exact, "also print the linear-system value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    const Config cfg = load_config(config_path);

    if (*filters) {
      const auto fb = wft::FilterBank::daubechies(K, reverse);
      std::cout << (filters_format == "json" ? fb.to_json() + "\n" : fb.to_csv());
      return 0;
    }

    if (*eval) {
      const auto fb = wft::FilterBank::daubechies(K);
      auto s = wft::refine_to_level(fb, deriv, level);
      if (kind == "wavelet") s = wft::wavelet_samples(fb, s);
      write_all(out_path, s.to_csv());
      return 0;
    }

    if (*conn) {
      const auto fb = wft::FilterBank::daubechies(K);
      wft::ConnectionEngine engine(fb);
      const auto& t = engine.table(table_shape(table));
      if (!verify) {
        std::cout << (conn_format == "json" ? t.to_json() + "\n" : t.to_csv());
        return 0;
      }
      wft::GoldenTable which;
      if (table == "pair") which = wft::GoldenTable::pair_derivative;
      else if (table == "gamma") which = wft::GoldenTable::gamma_pair;
      else if (table == "triple") which = wft::GoldenTable::triple;
      else throw wft::InvalidArgument("no reference table for '" + table + "'");
      if (K != 3) throw wft::InvalidArgument("reference tables are for K=3");
      const auto rep = golden_path.empty()
                           ? wft::verify_table(which, t)
                           : wft::verify_table(which, t, wft::parse_golden(which, read_all(golden_path)));
      std::cout << rep.summary() << "\n";
      return rep.ok() ? 0 : kVerify;
    }

    if (*analyze) {
      const auto fb = wft::FilterBank::daubechies(K);
      const auto x = read_signal(read_all(in_path));
      write_all(dwt_out, wft::dwt_analyze(x, fb, levels).to_json() + "\n");
      return 0;
    }
    if (*synthesize) {
      const auto p = wft::Pyramid::from_json(read_all(in_path));
      // an explicit --K has to agree with the pyramid
      const auto fb = wft::FilterBank::daubechies(synthesize->count("--K") ? K : p.K);
      std::string text;
      for (double v : wft::dwt_synthesize(p, fb)) text += wft::format_number(v) + "\n";
      write_all(dwt_out, text);
      return 0;
    }

    if (*blocks || *spectrum) {
      const auto fb = wft::FilterBank::daubechies(K);
      wft::ConnectionEngine engine(fb);
      const auto bl = wft::coupling_blocks(engine, k, l_max, N);
      if (*blocks) {
        for (const auto& b : bl) {
          std::cout << "# block " << wft::to_string(b.kind) << " scales " << b.row_scale << ","
                    << b.col_scale << " size " << b.matrix.rows() << "x" << b.matrix.cols()
                    << "\n";
          std::cout << (ham_format == "csv" ? wft::matrix_csv(b.matrix) : wft::matrix_coo(b.matrix));
        }
        return 0;
      }
      const auto q = wft::quadratic_form(mu, bl);
      const auto ev = wft::symmetric_eigenvalues(q.matrix);
      std::cout << "index,eigenvalue\n";
      for (std::size_t i = 0; i < ev.size(); ++i)
        std::cout << i << "," << wft::format_number(ev[i]) << "\n";
      return 0;
    }

    if (*gamma) {
      const auto fb = wft::FilterBank::daubechies(K);
      const auto r = wft::gamma_coefficients(fb, mu, wft::parse_basis_kind(ham_kind), k, cfg.gamma);
      std::cout << "{\"mu\":" << wft::format_number(r.mu) << ",\"kind\":\"" << wft::to_string(r.kind)
                << "\",\"scale\":" << r.scale << ",\"A\":" << wft::format_number(r.field_variance)
                << ",\"B\":" << wft::format_number(r.momentum_variance)
                << ",\"gamma_star\":" << wft::format_number(r.gamma_star)
                << ",\"discriminant\":" << wft::format_number(r.discriminant)
                << ",\"residual_density\":" << wft::format_number(r.residual_density)
                << ",\"tail_change\":" << wft::format_number(r.tail_change) << "}\n";
      return 0;
    }

    if (*flow) {
      const auto fb = wft::FilterBank::daubechies(K);
      wft::ConnectionEngine engine(fb);
      const auto q = wft::quadratic_form(mu, wft::coupling_blocks(engine, k, k, split));
      auto opt = cfg.flow;
      opt.variant = wft::parse_flow_variant(variant);
      if (lambda_max >= 0) opt.lambda_max = lambda_max;
      const auto st = wft::wegner_flow(q.matrix, q.coarse_size(), opt);
      std::cout << st.history_csv();
      return 0;
    }

    if (*oracle) {
      const auto fb = wft::FilterBank::daubechies(K);
      const auto factors = parse_query(query);
      const int J = oracle_level >= 0 ? oracle_level : cfg.oracle_level;
      const double v = wft::oracle_integral(fb, factors, J);
      std::cout << "oracle," << wft::format_number(v) << "\n";
      if (exact) {
        wft::ConnQuery q;
        for (const auto& f : factors) {
          q.factors.push_back({f.kind, f.scale, f.translation, f.deriv});
          q.power += f.power;
        }
        wft::ConnectionEngine engine(fb);
        const double e = engine.evaluate(q);
        std::cout << "exact," << wft::format_number(e) << "\n";
        std::cout << "difference," << wft::format_number(v - e) << "\n";
      }
      return 0;
    }
  } catch (const wft::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const wft::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}
