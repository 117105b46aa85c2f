#include "mflab/model_io.hpp"

#include <fstream>
#include <sstream>

#include "mflab/model_zoo.hpp"

namespace mflab {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string strip_comment(const std::string& line) {
  auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

bool decimal_token(const std::string& tok) {
  return tok.find('.') != std::string::npos || tok.find('e') != std::string::npos ||
         tok.find('E') != std::string::npos;
}

}  // namespace

ParsedModel parse_model_text(const std::string& text, const std::string& origin,
                             std::size_t image_check_depth) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  std::vector<std::string> alphabet_labels;
  std::vector<std::vector<std::string>> transition_rows;
  std::vector<std::vector<std::string>> adjacency_rows;
  std::vector<std::vector<std::string>> image_adjacency_rows;
  std::vector<std::string> factor_tokens;

  std::string section;
  bool any_decimal = false;

  auto fail = [&](const std::string& msg) {
    throw ParseError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string body = strip_comment(line);
    auto tokens = tokenize(body);
    if (tokens.empty()) continue;

    std::string head = tokens.front();
    bool is_header = head.size() > 1 && head.back() == ':';
    std::string key = is_header ? head.substr(0, head.size() - 1) : "";
    if (is_header) {
      if (key == "alphabet") {
        alphabet_labels.assign(tokens.begin() + 1, tokens.end());
        section.clear();
        continue;
      }
      if (key == "factor") {
        factor_tokens.assign(tokens.begin() + 1, tokens.end());
        section.clear();
        continue;
      }
      if (key == "transition" || key == "adjacency" || key == "image_adjacency") {
        section = key;
        if (tokens.size() > 1) fail("matrix rows start on the following lines");
        continue;
      }
      fail("unknown field '" + key + "'");
    }

    if (section == "transition") {
      transition_rows.push_back(tokens);
    } else if (section == "adjacency") {
      adjacency_rows.push_back(tokens);
    } else if (section == "image_adjacency") {
      image_adjacency_rows.push_back(tokens);
    } else {
      fail("unexpected content '" + head + "'");
    }
  }
  lineno = 0;

  if (alphabet_labels.empty()) throw ParseError(origin + ": missing 'alphabet'");
  if (transition_rows.empty()) throw ParseError(origin + ": missing 'transition'");
  if (factor_tokens.empty()) throw ParseError(origin + ": missing 'factor'");
  const std::size_t n = alphabet_labels.size();
  if (transition_rows.size() != n)
    throw ParseError(origin + ": transition needs " + std::to_string(n) + " rows, found " +
                     std::to_string(transition_rows.size()));
  if (factor_tokens.size() != n)
    throw ParseError(origin + ": factor needs one image label per alphabet symbol");

  RationalMatrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (transition_rows[i].size() != n)
      throw ParseError(origin + ": transition row " + std::to_string(i + 1) + " has " +
                       std::to_string(transition_rows[i].size()) + " entries, expected " +
                       std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) {
      const std::string& tok = transition_rows[i][j];
      any_decimal = any_decimal || decimal_token(tok);
      try {
        p(i, j) = parse_rational(tok);
      } catch (const ParseError& e) {
        throw ParseError(origin + ": transition row " + std::to_string(i + 1) + ": " + e.what());
      }
    }
  }

  Alphabet alphabet(alphabet_labels);

  auto parse_binary = [&](const std::vector<std::vector<std::string>>& rows,
                          const std::string& name, std::size_t dim) {
    if (rows.size() != dim)
      throw ParseError(origin + ": " + name + " needs " + std::to_string(dim) + " rows");
    BoolMatrix m(dim, dim, 0);
    for (std::size_t i = 0; i < dim; ++i) {
      if (rows[i].size() != dim)
        throw ParseError(origin + ": " + name + " row " + std::to_string(i + 1) +
                         " has the wrong width");
      for (std::size_t j = 0; j < dim; ++j) {
        if (rows[i][j] == "1")
          m(i, j) = 1;
        else if (rows[i][j] != "0")
          throw ParseError(origin + ": " + name + " entries must be 0 or 1");
      }
    }
    return m;
  };

  StochasticMatrix transition;
  try {
    transition = StochasticMatrix(std::move(p));
  } catch (const Error& e) {
    throw ParseError(origin + ": " + e.what());
  }

  SubshiftSpec shift = [&] {
    try {
      if (!adjacency_rows.empty()) {
        auto spec = make_subshift(alphabet,
                                  BinaryAdjacency(parse_binary(adjacency_rows, "adjacency", n)));
        if (!check_compatible(transition, spec))
          throw Error("transition support does not match the declared adjacency");
        return spec;
      }
      return make_subshift(alphabet, transition.support());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(origin + ": " + e.what());
    }
  }();

  // Image alphabet in order of first appearance.
  std::vector<std::string> image_labels;
  std::vector<int> assign;
  for (const auto& tok : factor_tokens) {
    std::size_t idx = 0;
    for (; idx < image_labels.size(); ++idx)
      if (image_labels[idx] == tok) break;
    if (idx == image_labels.size()) image_labels.push_back(tok);
    assign.push_back(static_cast<int>(idx));
  }

  try {
    FactorMap map = make_factor_map(alphabet, Alphabet(image_labels), std::move(assign));
    std::optional<SubshiftSpec> candidate;
    if (!image_adjacency_rows.empty())
      candidate = make_subshift(
          Alphabet(image_labels),
          BinaryAdjacency(parse_binary(image_adjacency_rows, "image_adjacency",
                                       image_labels.size())));
    FactorSystem fs(shift, std::move(map), std::move(candidate));

    auto sft_check = verify_image_sft(fs, image_check_depth);
    if (!sft_check.ok) {
      std::vector<std::string> witness;
      for (int sym : sft_check.witness->symbols)
        witness.push_back(fs.image().alphabet.label(sym));
      std::string joined;
      for (const auto& w : witness) joined += (joined.empty() ? "" : " ") + w;
      throw ImageNotSftError(
          origin + ": image is not the declared SFT; shortest unrealizable word: " + joined,
          std::move(witness));
    }

    MarkovModel model = make_markov_model(shift, std::move(transition));
    return ParsedModel{std::move(model), std::move(fs), !any_decimal, origin};
  } catch (const ParseError&) {
    throw;
  } catch (const ImageNotSftError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

ParsedModel parse_model_file(const std::string& path, std::size_t image_check_depth) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_text(buf.str(), path, image_check_depth);
}

ParsedModel parse_model(const std::string& path_or_preset, std::size_t image_check_depth) {
  if (auto preset = parse_preset(path_or_preset)) {
    ParsedModel pm{std::move(preset->model), std::move(preset->system), true, preset->id};
    return pm;
  }
  return parse_model_file(path_or_preset, image_check_depth);
}

std::string serialize_model(const ParsedModel& pm) {
  std::ostringstream out;
  out << "alphabet:";
  for (const auto& l : pm.model.shift.alphabet.labels()) out << ' ' << l;
  out << "\ntransition:\n";
  const std::size_t n = pm.model.shift.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      out << (j ? " " : "") << format_rational(pm.model.transition(static_cast<int>(i),
                                                                   static_cast<int>(j)));
    out << '\n';
  }
  out << "factor:";
  for (std::size_t a = 0; a < n; ++a)
    out << ' ' << pm.system.image().alphabet.label(pm.system.image_of(static_cast<int>(a)));
  out << "\nadjacency:\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      out << (j ? " " : "")
          << (pm.model.shift.adjacency.allows(static_cast<int>(i), static_cast<int>(j)) ? 1 : 0);
    out << '\n';
  }
  out << "image_adjacency:\n";
  const std::size_t nb = pm.system.image().size();
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = 0; j < nb; ++j)
      out << (j ? " " : "")
          << (pm.system.image().adjacency.allows(static_cast<int>(i), static_cast<int>(j)) ? 1
                                                                                           : 0);
    out << '\n';
  }
  return out.str();
}

std::string render_report(const Report& report, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::structured) {
    out << "analysis: " << report.analysis << '\n';
    for (const auto& [k, v] : report.fields) out << k << ": " << v << '\n';
    for (const auto& t : report.tables) {
      out << "table " << t.name << ":\n";
      out << "  ";
      for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
      out << '\n';
      for (const auto& row : t.rows) {
        out << "  ";
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
      }
    }
  } else {
    out << "# analysis," << report.analysis << '\n';
    for (const auto& [k, v] : report.fields) out << "# " << k << ',' << v << '\n';
    for (const auto& t : report.tables) {
      out << "# table," << t.name << '\n';
      for (std::size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
      out << '\n';
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace mflab
