// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end for the top-k query simulator. Links only the
// public C API.
#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "fdtopk/fdtopk.h"

namespace {

int report_failure(fd_status status) {
  std::fprintf(stderr, "error: %s\n", fd_last_error_message());
  return status == FD_ERR_CONFIG ? 1 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator for fully-distributed top-k queries "
               "in unstructured overlays"};
  app.set_version_flag("--version", std::string(fd_version()));
  app.require_subcommand(1);

  std::string configPath;
  std::string outDir = "out";
  int jobs = 1;
  bool trace = false;
  CLI::App* run = app.add_subcommand("run", "Run an experiment sweep");
  run->add_option("config", configPath, "experiment config file")->required();
  run->add_option("--out", outDir, "output directory (results.csv, summary.csv)");
  run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--trace", trace, "write one event trace per cell");

  std::string validatePath;
  CLI::App* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("config", validatePath, "experiment config file")->required();

  double dg = 0;
  std::uint64_t npq = 0;
  std::uint64_t edges = 0;
  int k = 20;
  int entryBytes = 10;
  CLI::App* predict =
      app.add_subcommand("predict", "Closed-form traffic predictions");
  predict->add_option("--dg", dg, "average degree of the covered peer set")->required();
  predict->add_option("--npq", npq, "number of covered peers")->required();
  predict->add_option("--edges", edges,
                      "edges inside the covered set (default dg*npq/2)");
  predict->add_option("--k", k, "result size k");
  predict->add_option("--l", entryBytes, "score-list entry size in bytes");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    fd_experiment* exp = nullptr;
    fd_status status = fd_experiment_open(configPath.c_str(), &exp);
    if (status != FD_OK) return report_failure(status);
    status = fd_experiment_run(exp, outDir.c_str(), jobs, trace ? 1 : 0);
    fd_experiment_close(exp);
    if (status != FD_OK) return report_failure(status);
    std::printf("wrote %s/results.csv and %s/summary.csv\n", outDir.c_str(),
                outDir.c_str());
    return 0;
  }

  if (validate->parsed()) {
    fd_experiment* exp = nullptr;
    fd_status status = fd_experiment_open(validatePath.c_str(), &exp);
    if (status != FD_OK) return report_failure(status);
    fd_experiment_close(exp);
    std::printf("config ok\n");
    return 0;
  }

  // predict
  if (predict->count("--edges") == 0) edges = static_cast<std::uint64_t>(dg * npq / 2.0);
  std::printf("m_fw(basic)      = %.0f\n", fd_predict_mfw_basic(dg, npq));
  std::printf("m_fw(strategy1)  = %llu\n",
              static_cast<unsigned long long>(fd_predict_mfw_strategy1(edges)));
  std::printf("b_bw             = %llu\n",
              static_cast<unsigned long long>(fd_predict_bbw(k, entryBytes, npq)));
  return 0;
}
