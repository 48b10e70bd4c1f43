#pragma once

#include "sspbound/frontend/frontend.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace testutil {

inline std::string read_model(const std::string& name) {
  std::ifstream in(std::string(SSPBOUND_MODELS) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline sspbound::Model corpus(const std::string& name) {
  return sspbound::frontend::load_model(read_model(name + ".smdp")).model;
}

inline sspbound::Model model_of(const std::string& source) { return sspbound::frontend::load_model(source).model; }

inline const char* kCorpus[] = {"gambler", "robot2d", "multirobot", "mini_roulette", "american_roulette", "log"};

}  // namespace testutil
