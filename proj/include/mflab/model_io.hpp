#ifndef MFLAB_MODEL_IO_HPP
#define MFLAB_MODEL_IO_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mflab/factor.hpp"
#include "mflab/markov.hpp"

namespace mflab {

// A validated model plus provenance. `exact_inputs` is false when the file
// used decimal entries; values derived from them are reported as double-mode.
struct ParsedModel {
  MarkovModel model;
  FactorSystem system;
  bool exact_inputs;
  std::string origin;  // preset id or file path
};

// Reads the structured text format:
//
//   alphabet: 1 2 3 4
//   transition:
//   1/2 1/2 0 0
//   ...
//   factor: a b a c            # image label per alphabet symbol, in order
//   adjacency:                 # optional; must equal the transition support
//   image_adjacency:           # optional candidate for the image SFT
//
// Fractions stay exact; decimals are converted exactly but flag double mode.
// Compatibility and the image-SFT check run here; failures throw (ParseError
// or ImageNotSftError with the shortest witness).
ParsedModel parse_model_file(const std::string& path, std::size_t image_check_depth = 16);
ParsedModel parse_model_text(const std::string& text, const std::string& origin,
                             std::size_t image_check_depth = 16);

// Preset id or file path; presets win.
ParsedModel parse_model(const std::string& path_or_preset, std::size_t image_check_depth = 16);

std::string serialize_model(const ParsedModel& pm);

// Deterministic report: ordered fields plus named tables. Rendering the same
// report twice is byte-identical; no timestamps, no locale formatting.
struct Report {
  std::string analysis;
  std::vector<std::pair<std::string, std::string>> fields;
  struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
  };
  std::vector<Table> tables;

  void field(const std::string& key, const std::string& value) { fields.emplace_back(key, value); }
};

enum class ReportFormat { structured, csv };

std::string render_report(const Report& report, ReportFormat format);

}  // namespace mflab

#endif  // MFLAB_MODEL_IO_HPP
