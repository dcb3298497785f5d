// SPDX-License-Identifier: Apache-2.0
#include "fdtopk/fdtopk.h"

#include <fstream>
#include <sstream>
#include <string>

#include "core/experiment.hpp"
#include "core/metrics.hpp"
#include "core/protocol.hpp"

namespace {

thread_local std::string g_lastError;

void set_error(std::string msg) { g_lastError = std::move(msg); }

}  // namespace

struct fd_experiment {
  fdtopk::ExperimentConfig config;
};

extern "C" {

fd_status fd_experiment_open(const char* path, fd_experiment** out) {
  if (path == nullptr || out == nullptr) {
    set_error("null argument");
    return FD_ERR_CONFIG;
  }
  *out = nullptr;
  std::ifstream in(path);
  if (!in) {
    set_error(std::string("cannot open config file: ") + path);
    return FD_ERR_RUNTIME;
  }
  std::vector<std::string> errors;
  auto config = fdtopk::parse_experiment_config(in, errors);
  if (!config) {
    std::ostringstream msg;
    for (std::size_t i = 0; i < errors.size(); ++i) {
      if (i) msg << '\n';
      msg << errors[i];
    }
    set_error(msg.str());
    return FD_ERR_CONFIG;
  }
  *out = new fd_experiment{std::move(*config)};
  set_error("");
  return FD_OK;
}

fd_status fd_experiment_run(fd_experiment* exp, const char* out_dir, int jobs, int trace) {
  if (exp == nullptr || out_dir == nullptr) {
    set_error("null argument");
    return FD_ERR_CONFIG;
  }
  try {
    fdtopk::run_experiment(exp->config, out_dir, jobs, trace != 0);
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return FD_ERR_CONFIG;
  } catch (const std::exception& e) {
    set_error(e.what());
    return FD_ERR_RUNTIME;
  }
  set_error("");
  return FD_OK;
}

void fd_experiment_close(fd_experiment* exp) { delete exp; }

const char* fd_last_error_message(void) { return g_lastError.c_str(); }

double fd_predict_mfw_basic(double avg_degree, uint64_t covered_peers) {
  return fdtopk::predict_mfw_basic(avg_degree, covered_peers);
}

uint64_t fd_predict_mfw_strategy1(uint64_t edges_in_covered_set) {
  return fdtopk::predict_mfw_strategy1(edges_in_covered_set);
}

uint64_t fd_predict_bbw(int k, int entry_bytes, uint64_t covered_peers) {
  return fdtopk::predict_bbw(k, entry_bytes, covered_peers);
}

fd_status fd_inflate_k(int k, double p, int* out) {
  if (out == nullptr || k < 1) {
    set_error("k must be >= 1 and out non-null");
    return FD_ERR_CONFIG;
  }
  try {
    *out = fdtopk::inflate_k(k, p);
  } catch (const std::exception& e) {
    set_error(e.what());
    return FD_ERR_CONFIG;
  }
  set_error("");
  return FD_OK;
}

const char* fd_version(void) { return "1.0.0"; }

}  // extern "C"
