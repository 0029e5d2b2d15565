#include "pg/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Options {
  pg::RunConfig cfg;
  std::string epsilon = "1/2";
  std::string triangulation;
  std::string format = "plain";
  double max_memory_gb = 12;
  int count = 20;
  bool cumulative = false;
  bool oeis = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("input", o.cfg.input, "Graph document (structured or assignment style)")->required()->check(CLI::ExistingFile);
  sub->add_option("--start", o.cfg.start, "Start vertex class");
  sub->add_option("--epsilon", o.epsilon, "Lower bound for a(v), rational in (0,1)");
  sub->add_option("--triangulation", o.triangulation, "Facet triangulation override document")->check(CLI::ExistingFile);
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"plain", "latex", "structured"}));
  sub->add_option("--max-memory-gb", o.max_memory_gb, "Memory cap for lattice searches");
  sub->add_option("--max-cycles", o.cfg.cycle_cap, "Cap on enumerated quotient cycles");
}

void finish(Options& o) {
  o.cfg.epsilon = pg::parse_rat(o.epsilon);
  if (!o.triangulation.empty()) o.cfg.triangulation = o.triangulation;
  o.cfg.max_bytes = static_cast<std::size_t>(o.max_memory_gb * 1024.0 * 1024.0 * 1024.0);
}

std::string qp_plain(const pg::QuasiPolynomial& q) {
  std::string s = "period " + std::to_string(q.period) + ", valid for i >= " + std::to_string(q.threshold) + "\n";
  for (std::size_t r = 0; r < q.pieces.size(); ++r) {
    s += "  i = " + std::to_string(r) + " mod " + std::to_string(q.period) + ":";
    std::string poly;
    for (std::size_t k = q.pieces[r].size(); k-- > 0;) {
      const pg::Rat& c = q.pieces[r][k];
      if (c == 0) continue;
      std::string mag = pg::to_string(c < 0 ? pg::Rat(-c) : c);
      std::string mono = k == 0 ? "" : (k == 1 ? "i" : "i^" + std::to_string(k));
      std::string term = k > 0 && mag == "1" ? mono : (k > 0 ? mag + " " + mono : mag);
      poly += poly.empty() ? (c < 0 ? "-" : "") + term : (c < 0 ? " - " : " + ") + term;
    }
    s += " " + (poly.empty() ? std::string("0") : poly) + "\n";
  }
  return s;
}

int cmd_series(Options& o) {
  pg::SeriesRun run = pg::run_series(o.cfg);
  if (o.format == "structured") {
    std::cout << pg::series_document(run) << "\n";
  } else if (o.format == "latex") {
    std::cout << pg::series_latex(run.series) << "\n";
  } else {
    std::cout << "series " << pg::series_plain(run.series) << "\n"
              << qp_plain(run.qp) << "beta " << pg::to_string(run.report.beta) << " cpx_Gamma " << run.report.cpx_gamma
              << " gamma " << run.report.gamma << " C1 " << pg::to_string(run.report.C1) << " C2' "
              << pg::to_string(run.report.C2p) << "\n"
              << "verified against " << run.terms.s.size() << " terms\n";
  }
  if (!run.prediction.ok) {
    std::cerr << "series_builder: prediction mismatch at i = " << run.prediction.first_mismatch << ": expected "
              << run.prediction.expected << ", found " << run.prediction.actual << "\n";
    return 1;
  }
  return 0;
}

int cmd_invariants(Options& o) {
  pg::Prepared p = pg::prepare(o.cfg);
  pg::InvariantReport r = pg::compute_invariants(p, o.cfg);
  std::cout << (o.format == "structured" ? pg::report_json(r, p.geo) : pg::render_report(r, p.geo)) << "\n";
  return 0;
}

int cmd_terms(Options& o) {
  pg::PeriodicGraph g = pg::load_graph(o.cfg.input);
  if (o.cfg.start < 0 || o.cfg.start >= g.classes) throw pg::StageError("cli_frontend: start class out of range");
  pg::LatticeOptions opt;
  opt.max_bytes = o.cfg.max_bytes;
  pg::GrowthTerms t = pg::growth_terms(g, o.cfg.start, o.count, opt);
  const auto& seq = o.cumulative ? t.b : t.s;
  if (o.oeis) {
    for (std::size_t i = 0; i < seq.size(); ++i) std::cout << (i ? "," : "") << seq[i];
    std::cout << "\n";
  } else {
    for (auto x : seq) std::cout << x << "\n";
  }
  return 0;
}

int cmd_c2(Options& o) {
  o.cfg.exact_c2 = true;
  pg::Prepared p = pg::prepare(o.cfg);
  pg::InvariantReport r = pg::compute_invariants(p, o.cfg);
  std::cout << "C1 " << pg::to_string(r.C1) << "\nC2' " << pg::to_string(r.C2p) << "\nC2 " << pg::to_string(*r.C2_exact)
            << (r.C2_exact_lower_bound ? " (lower bound only)" : "") << "\n";
  return 0;
}

int cmd_verify(Options& o) {
  pg::SeriesRun run = pg::run_series(o.cfg);
  pg::LatticeOptions opt;
  opt.max_bytes = o.cfg.max_bytes;
  auto samples = pg::translation_check(run.prep, run.report, o.cfg.samples, opt);
  int bad = 0;
  for (const auto& s : samples)
    if (!s.ok) {
      ++bad;
      std::cerr << "lattice_engine: translation by " << s.cpx << " * " << pg::to_string(s.v) << " from class " << s.y.cls
                << " changes distance " << s.d_before << " -> " << s.d_after << "\n";
    }
  std::cout << "translation samples " << samples.size() << " failures " << bad << "\n";
  std::cout << "prediction " << (run.prediction.ok ? "ok" : "MISMATCH") << " over " << run.terms.s.size() << " terms\n";
  return bad == 0 && run.prediction.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact growth series of periodic graphs"};
  app.require_subcommand(1);
  Options o;
  auto* series = app.add_subcommand("series", "Certified growth series and quasi-polynomial");
  add_common(series, o);
  series->add_option("--check-extra", o.cfg.check_extra, "Extra terms compared with the prediction");
  auto* inv = app.add_subcommand("invariants", "Invariant report");
  add_common(inv, o);
  auto* terms = app.add_subcommand("terms", "Growth sequence by lattice search");
  add_common(terms, o);
  terms->add_option("--count", o.count, "Largest index N");
  terms->add_flag("--cumulative", o.cumulative, "Print b_i instead of s_i");
  terms->add_flag("--oeis", o.oeis, "Comma-separated output");
  auto* c2 = app.add_subcommand("c2", "Exact C2 on the certified region");
  add_common(c2, o);
  auto* verify = app.add_subcommand("verify", "Translation and prediction checks");
  add_common(verify, o);
  verify->add_option("--samples", o.cfg.samples, "Translation samples");
  verify->add_option("--check-extra", o.cfg.check_extra, "Extra terms compared with the prediction");
  CLI11_PARSE(app, argc, argv);
  try {
    finish(o);
    if (*series) return cmd_series(o);
    if (*inv) return cmd_invariants(o);
    if (*terms) return cmd_terms(o);
    if (*c2) return cmd_c2(o);
    return cmd_verify(o);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
