#include "mflab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mflab/conditionals.hpp"
#include "mflab/disintegration.hpp"
#include "mflab/model_io.hpp"
#include "mflab/model_zoo.hpp"

namespace mflab {

namespace {

struct CommonOptions {
  std::string model_path;
  std::string preset;
  std::size_t depth = 8;
  std::size_t ext = 12;
  double eps = 0.05;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format = "json-like-structured-text";
  std::string point;
  std::vector<std::string> continuations;
  std::string cylinder;
  std::size_t samples = 100000;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  auto* model = cmd->add_option("--model", opt.model_path, "model file path");
  auto* preset = cmd->add_option("--preset", opt.preset,
                                 "preset id: wl4, pos3, furstenberg:<p>, xor:<p>");
  model->excludes(preset);
  cmd->add_option("--depth", opt.depth, "analysis depth");
  cmd->add_option("--ext", opt.ext, "continuation length");
  cmd->add_option("--eps", opt.eps, "gap threshold");
  cmd->add_option("--seed", opt.seed, "RNG seed (echoed in the report)");
  cmd->add_option("--out", opt.out_path, "write the report here instead of stdout");
  cmd->add_option("--format", opt.format, "csv or json-like-structured-text")
      ->check(CLI::IsMember({"csv", "json-like-structured-text"}));
}

Word parse_word(const Alphabet& alphabet, const std::string& text, const std::string& what) {
  std::vector<std::string> parts;
  if (text.find(',') != std::string::npos) {
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) parts.push_back(part);
  } else {
    bool single = true;
    for (const auto& l : alphabet.labels())
      if (l.size() > 1) single = false;
    if (single) {
      for (char c : text) parts.emplace_back(1, c);
    } else {
      parts.push_back(text);
    }
  }
  Word w;
  for (const auto& p : parts) {
    auto idx = alphabet.try_index_of(p);
    if (!idx) throw ParseError(what + ": unknown symbol '" + p + "'");
    w.symbols.push_back(*idx);
  }
  if (w.empty()) throw ParseError(what + ": empty word");
  return w;
}

std::string exact_tag(const ParsedModel& pm, const Rational& q) {
  return format_rational(q) + (pm.exact_inputs ? " [exact]" : " [double]");
}

std::string double_tag(double v) { return format_double(v) + " [double]"; }

void echo_inputs(Report& r, const ParsedModel& pm, const CommonOptions& opt) {
  r.field("input", pm.origin);
  r.field("arithmetic", pm.exact_inputs ? "exact" : "double");
  r.field("seed", std::to_string(opt.seed));
}

Report run_check(const ParsedModel& pm, const CommonOptions& opt) {
  Report r;
  r.analysis = "check";
  echo_inputs(r, pm, opt);
  r.field("domain_size", std::to_string(pm.model.shift.size()));
  r.field("image_size", std::to_string(pm.system.image().size()));
  r.field("irreducible", is_irreducible(pm.model.shift) ? "true" : "false");
  r.field("aperiodic", is_aperiodic(pm.model.shift) ? "true" : "false");
  r.field("primitive", is_primitive(pm.model.shift) ? "true" : "false");
  r.field("compatible", check_compatible(pm.model.transition, pm.model.shift) ? "true" : "false");
  auto sft = verify_image_sft(pm.system, opt.depth < 2 ? 2 : opt.depth);
  r.field("image_sft", sft.ok ? (sft.complete ? "verified" : "verified-up-to-depth") : "violated");
  r.field("topological_entropy", double_tag(topological_entropy(pm.model.shift)));
  r.field("entropy_rate", double_tag(entropy_rate(pm.model)));

  Report::Table t;
  t.name = "stationary";
  t.header = {"symbol", "probability"};
  for (std::size_t a = 0; a < pm.model.shift.size(); ++a)
    t.rows.push_back({pm.model.shift.alphabet.label(static_cast<int>(a)),
                      exact_tag(pm, pm.model.stationary[a])});
  r.tables.push_back(std::move(t));
  return r;
}

Report run_lump(const ParsedModel& pm, const CommonOptions& opt) {
  Report r;
  r.analysis = "lump";
  echo_inputs(r, pm, opt);

  auto strong = strong_lumpability(pm.model.transition, pm.system.map());
  r.field("strong_lumpable", strong.lumpable ? "true" : "false");
  if (!strong.lumpable) r.field("strong_lumpable_detail", strong.detail);

  auto reversed = reversed_lumpability(pm.model, pm.system.map());
  r.field("reversed_lumpable", reversed.holds ? "true" : "false");
  if (!reversed.holds) r.field("reversed_lumpable_detail", reversed.detail);

  auto probe = markov_order_probe(pm.model, pm.system, opt.depth < 2 ? 2 : opt.depth);
  r.field("factor_markov_order_le_1",
          probe.order_at_most_one ? "true (up to depth " + std::to_string(probe.depth) + ")"
                                  : "false");
  if (probe.violating_word)
    r.field("order_violation_word",
            format_word(pm.system.image().alphabet, *probe.violating_word));

  const auto& ia = pm.system.image().alphabet;
  auto matrix_table = [&](const std::string& name, const std::string& corner,
                          const RationalMatrix& m) {
    Report::Table t;
    t.name = name;
    t.header = {corner};
    for (std::size_t b = 0; b < ia.size(); ++b) t.header.push_back(ia.label(static_cast<int>(b)));
    for (std::size_t b = 0; b < m.rows(); ++b) {
      std::vector<std::string> row{ia.label(static_cast<int>(b))};
      for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(exact_tag(pm, m(b, c)));
      t.rows.push_back(std::move(row));
    }
    return t;
  };
  if (strong.lumpable)
    r.tables.push_back(matrix_table("factor_matrix", "from", *strong.factor_matrix));
  if (reversed.holds)
    r.tables.push_back(matrix_table("reversed_factor_kernel", "y0/y1", *reversed.s_matrix));
  if (probe.order_at_most_one)
    r.tables.push_back(matrix_table("recovered_transition", "from", probe.recovered_transition));
  return r;
}

Report run_mix(const ParsedModel& pm, const CommonOptions& opt) {
  Report r;
  r.analysis = "mix";
  echo_inputs(r, pm, opt);
  auto verdict = is_fibre_mixing(pm.system);
  switch (verdict.kind) {
    case MixingVerdict::Kind::mixing:
      r.field("fibre_mixing", "mixing");
      r.field("uniform_index", std::to_string(*verdict.index));
      break;
    case MixingVerdict::Kind::not_mixing:
      r.field("fibre_mixing", "not_mixing");
      r.field("witness_word", format_word(pm.system.image().alphabet, *verdict.witness_word));
      r.field("witness_pair",
              pm.model.shift.alphabet.label(verdict.witness_pair->first) + " -> " +
                  pm.model.shift.alphabet.label(verdict.witness_pair->second));
      break;
    case MixingVerdict::Kind::inconclusive:
      r.field("fibre_mixing", "inconclusive");
      r.field("state_cap", std::to_string(verdict.state_cap));
      break;
  }
  r.field("states_explored", std::to_string(verdict.states_explored));
  return r;
}

Report run_gfun(const ParsedModel& pm, const CommonOptions& opt) {
  Report r;
  r.analysis = "gfun";
  echo_inputs(r, pm, opt);
  r.field("ext", std::to_string(opt.ext));

  Report::Table gt;
  gt.name = "g_n";
  gt.header = {"word", "g"};
  const std::size_t table_depth = std::min<std::size_t>(opt.depth, 3);
  for (std::size_t len = 2; len <= table_depth + 1; ++len)
    for (const auto& y : allowed_words(pm.system.image(), len)) {
      Rational mass = factor_cylinder_probability(
          pm.model, pm.system, Word{std::vector<int>(y.symbols.begin() + 1, y.symbols.end()), 0});
      if (mass == 0) continue;
      gt.rows.push_back(
          {format_word(pm.system.image().alphabet, y), exact_tag(pm, g_n(pm.model, pm.system, y))});
    }
  r.tables.push_back(std::move(gt));

  Report::Table vt;
  vt.name = "variation";
  vt.header = {"n", "lower", "upper_heuristic", "mode"};
  VariationOptions vopts;
  vopts.seed = opt.seed;
  std::vector<double> lowers;
  for (std::size_t n = 1; n <= opt.depth; ++n) {
    auto est = variation_estimate(pm.model, pm.system, n, opt.ext, vopts);
    lowers.push_back(est.lower);
    vt.rows.push_back({std::to_string(n), format_double(est.lower),
                       format_double(est.upper_heuristic),
                       est.exhaustive ? "exhaustive" : "sampled"});
  }
  r.tables.push_back(std::move(vt));
  auto fit = fit_geometric_decay(lowers);
  r.field("decay_rate", double_tag(fit.rate));
  r.field("decay_r2", double_tag(fit.r2));
  return r;
}

Report run_badconfig(const ParsedModel& pm, const CommonOptions& opt) {
  Report r;
  r.analysis = "badconfig";
  echo_inputs(r, pm, opt);
  BadConfigOptions bopts;
  bopts.n_max = opt.depth;
  bopts.m_max = opt.ext;
  bopts.eps = opt.eps;
  bopts.seed = opt.seed;
  r.field("eps", format_double(opt.eps));
  r.field("n_max", std::to_string(bopts.n_max));
  r.field("m_max", std::to_string(bopts.m_max));
  auto witness = find_bad_configuration(pm.model, pm.system, bopts);
  if (!witness) {
    r.field("witness", "none found up to bounds (absence is not a regularity proof)");
    return r;
  }
  const auto& ia = pm.system.image().alphabet;
  r.field("witness", "found");
  r.field("center", format_word(ia, witness->center));
  r.field("continuation_high", format_word(ia, witness->continuation_high));
  r.field("continuation_low", format_word(ia, witness->continuation_low));
  r.field("g_high", exact_tag(pm, witness->g_high));
  r.field("g_low", exact_tag(pm, witness->g_low));
  r.field("gap", double_tag(witness->gap));
  return r;
}

Report run_gtilde(const ParsedModel& pm, const CommonOptions& opt) {
  Report r;
  r.analysis = "gtilde";
  echo_inputs(r, pm, opt);
  const auto& ia = pm.system.image().alphabet;

  Word base;
  if (!opt.point.empty()) {
    base = parse_word(ia, opt.point, "--point");
    if (base.size() < 2)
      throw ParseError("--point needs at least two symbols (y_0 plus a window)");
  } else {
    Word hidden = sample_path(pm.model, opt.depth + 1, opt.seed);
    base = pm.system.image_word(hidden);
  }
  r.field("point", format_word(ia, base));
  r.field("kappa_bound", exact_tag(pm, positivity_bound(pm.model)));

  Report::Table t;
  t.name = "g_tilde";
  t.header = {"depth", "value", "delta", "converged"};
  for (std::size_t depth = 1; depth + 1 <= base.size(); ++depth) {
    Word y{std::vector<int>(base.symbols.begin(),
                            base.symbols.begin() + static_cast<long>(depth) + 1),
           0};
    auto gv = g_tilde(pm.model, pm.system, y);
    t.rows.push_back({std::to_string(gv.depth), exact_tag(pm, gv.value),
                      gv.delta ? format_rational(*gv.delta) : "-",
                      gv.converged ? "yes" : "no"});
  }
  r.tables.push_back(std::move(t));

  // Normalization across admissible first symbols at the full depth.
  Word window{std::vector<int>(base.symbols.begin() + 1, base.symbols.end()), 0};
  Rational total(0);
  for (std::size_t b = 0; b < ia.size(); ++b) {
    if (!pm.system.image().adjacency.allows(static_cast<int>(b), window[0])) continue;
    Word y{{static_cast<int>(b)}, 0};
    y.symbols.insert(y.symbols.end(), window.symbols.begin(), window.symbols.end());
    total += g_tilde(pm.model, pm.system, y).value;
  }
  r.field("normalization_sum", exact_tag(pm, total));
  return r;
}

Report run_tjur(const ParsedModel& pm, const CommonOptions& opt) {
  Report r;
  r.analysis = "tjur";
  echo_inputs(r, pm, opt);
  const auto& ia = pm.system.image().alphabet;
  const auto& da = pm.model.shift.alphabet;

  Word prefix;
  if (!opt.point.empty()) {
    prefix = parse_word(ia, opt.point, "--point");
  } else {
    Word hidden = sample_path(pm.model, opt.depth, opt.seed);
    prefix = pm.system.image_word(hidden);
  }
  std::vector<Word> continuations;
  for (const auto& c : opt.continuations)
    continuations.push_back(parse_word(ia, c, "--cont"));
  if (continuations.empty()) {
    int last = prefix.symbols.back();
    for (std::size_t b = 0; b < ia.size(); ++b)
      if (pm.system.image().adjacency.allows(last, static_cast<int>(b)))
        continuations.push_back(Word{{static_cast<int>(b)}, 0});
  }
  Word cylinder = opt.cylinder.empty() ? Word{{pm.system.preimage(prefix[0]).front()}, 0}
                                       : parse_word(da, opt.cylinder, "--cyl");

  r.field("point", format_word(ia, prefix));
  r.field("test_cylinder", format_word(da, cylinder));
  auto probe = tjur_probe(pm.model, pm.system, prefix, continuations, cylinder);
  Rational eps = parse_rational(format_double(opt.eps));
  r.field("discontinuity_certified",
          spread_persists(probe, eps)
              ? "yes (spread >= " + format_double(opt.eps) + " over the last 3 depths)"
              : "no (at eps " + format_double(opt.eps) + ")");

  Report::Table t;
  t.name = "conditionals";
  t.header = {"depth"};
  for (const auto& z : continuations) t.header.push_back("z=" + format_word(ia, z));
  t.header.push_back("spread");
  for (std::size_t d = 0; d < probe.values.size(); ++d) {
    std::vector<std::string> row{std::to_string(d + 1)};
    for (const auto& v : probe.values[d]) row.push_back(exact_tag(pm, v));
    row.push_back(exact_tag(pm, probe.spreads[d]));
    t.rows.push_back(std::move(row));
  }
  r.tables.push_back(std::move(t));
  return r;
}

Report run_simulate(const ParsedModel& pm, const CommonOptions& opt) {
  Report r;
  r.analysis = "simulate";
  echo_inputs(r, pm, opt);
  const auto& ia = pm.system.image().alphabet;

  Word y;
  if (!opt.point.empty()) {
    y = parse_word(ia, opt.point, "--point");
  } else {
    Word hidden = sample_path(pm.model, std::min<std::size_t>(opt.depth, 4) + 1, opt.seed);
    y = pm.system.image_word(hidden);
  }
  r.field("point", format_word(ia, y));
  r.field("samples", std::to_string(opt.samples));

  auto emp = empirical_conditional(pm.model, pm.system, y, opt.samples, opt.seed);
  if (emp.flagged) {
    r.field("estimate", "flagged: conditioning event never sampled");
    return r;
  }
  r.field("estimate", format_double(emp.estimate) + " [sampled]");
  r.field("stderr", format_double(emp.stderr_value) + " [sampled]");
  r.field("conditioning_hits", std::to_string(emp.conditioning_hits));
  Rational exact = g_n(pm.model, pm.system, y);
  r.field("exact", exact_tag(pm, exact));
  double diff = std::abs(emp.estimate - to_double(exact));
  r.field("abs_difference", double_tag(diff));
  if (emp.stderr_value > 0)
    r.field("difference_in_stderr", double_tag(diff / emp.stderr_value));
  return r;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"mflab: single-block factors of finite-state Markov chains"};
  app.require_subcommand(1);

  struct Sub {
    std::string name;
    std::string help;
    Report (*runner)(const ParsedModel&, const CommonOptions&);
    bool needs_point_opts;
    CLI::App* cmd = nullptr;
    CommonOptions opts;
  };
  std::vector<Sub> subs = {
      {"check", "validity, predicates and entropies", run_check, false, nullptr, {}},
      {"lump", "strong/reversed lumpability and Markov-order probe", run_lump, false, nullptr, {}},
      {"mix", "fibre-mixing decision", run_mix, false, nullptr, {}},
      {"gfun", "conditional table, variation bounds, decay fit", run_gfun, false, nullptr, {}},
      {"badconfig", "search for a discontinuity witness", run_badconfig, false, nullptr, {}},
      {"gtilde", "fibre-disintegration conditionals with convergence deltas", run_gtilde, true,
       nullptr, {}},
      {"tjur", "cylinder-net probe at a point", run_tjur, true, nullptr, {}},
      {"simulate", "Monte Carlo cross-check of a conditional", run_simulate, true, nullptr, {}},
  };
  for (auto& s : subs) {
    s.cmd = app.add_subcommand(s.name, s.help);
    add_common(s.cmd, s.opts);
    if (s.needs_point_opts || s.name == "simulate") {
      s.cmd->add_option("--point", s.opts.point, "observation word (labels, comma-separated)");
    }
    if (s.name == "tjur") {
      s.cmd->add_option("--cont", s.opts.continuations, "continuation words");
      s.cmd->add_option("--cyl", s.opts.cylinder, "hidden test cylinder at position 0");
    }
    if (s.name == "simulate")
      s.cmd->add_option("--samples", s.opts.samples, "number of sampled paths");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  for (auto& s : subs) {
    if (!s.cmd->parsed()) continue;
    try {
      if (s.opts.model_path.empty() && s.opts.preset.empty())
        throw ParseError("one of --model or --preset is required");
      ParsedModel pm = s.opts.preset.empty() ? parse_model(s.opts.model_path)
                                             : parse_model(s.opts.preset);
      Report report = s.runner(pm, s.opts);
      std::string rendered = render_report(
          report, s.opts.format == "csv" ? ReportFormat::csv : ReportFormat::structured);
      if (s.opts.out_path.empty()) {
        out << rendered;
      } else {
        std::ofstream f(s.opts.out_path, std::ios::binary);
        if (!f) throw ParseError("cannot write to '" + s.opts.out_path + "'");
        f << rendered;
      }
      return 0;
    } catch (const ImageNotSftError& e) {
      err << "error: " << e.what() << '\n';
      return 3;
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    }
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace mflab
