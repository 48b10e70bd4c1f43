#pragma once

#include "sspbound/frontend/desugar.hpp"
#include "sspbound/frontend/lexer.hpp"
#include "sspbound/frontend/parser.hpp"
#include "sspbound/frontend/printer.hpp"
#include "sspbound/frontend/validate.hpp"

#include <string_view>

namespace sspbound::frontend {

/// Source text to validated model: tokenize, parse, desugar, validate.
inline ValidatedModel load_model(std::string_view source) {
  return validate(desugar_prob_if(parse_source(source)));
}

}  // namespace sspbound::frontend
