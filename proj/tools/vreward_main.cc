// Copyright 2026 The vreward Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: score, batch-score, eval, train-toy, gen-toy.
//
// Exit codes: 0 success, 1 validation/usage error, 2 input or IO error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vreward/batch.h"
#include "vreward/config_file.h"
#include "vreward/corpus.h"
#include "vreward/errors.h"
#include "vreward/grpo.h"
#include "vreward/jsonl.h"
#include "vreward/reward.h"
#include "vreward/toylab.h"

namespace {

using namespace vreward;

const std::set<std::string> kRewardKeys = {"tau", "alpha", "open_metric",
                                           "length_unit", "length_enabled",
                                           "ems_mode"};
const std::set<std::string> kGrpoKeys = {"group_size", "clip_eps", "kl_beta", "lr",
                                         "std_floor", "temperature", "max_grad_norm"};

// Flags shared by every scoring subcommand. Empty optionals mean "not given".
struct RewardFlags {
  std::string config_path;
  std::optional<double> tau;
  std::optional<int> alpha;
  std::optional<std::string> open_metric;
  std::optional<std::string> ems_mode;
  std::optional<std::string> length_unit;
  std::optional<std::string> length_enabled;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path,
                    std::string("Key-value config file (default: $") + kConfigEnvVar + ")");
    app->add_option("--tau", tau, "Open-text correctness threshold (0-100)");
    app->add_option("--alpha", alpha, "Length reward normalization factor");
    app->add_option("--open-metric", open_metric, "rouge|ems|mix|bleu")
        ->check(CLI::IsMember({"rouge", "ems", "mix", "bleu"}));
    app->add_option("--ems-mode", ems_mode, "strict|token-f1")
        ->check(CLI::IsMember({"strict", "token-f1"}));
    app->add_option("--length-unit", length_unit, "words|chars")
        ->check(CLI::IsMember({"words", "chars"}));
    app->add_option("--length-enabled", length_enabled, "true|false")
        ->check(CLI::IsMember({"true", "false"}));
  }

  std::map<std::string, std::string> file_values() const {
    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv(kConfigEnvVar); env != nullptr) path = env;
    }
    if (path.empty()) return {};
    auto values = load_key_value_file(path);
    for (const auto& [key, value] : values) {
      if (!kRewardKeys.count(key) && !kGrpoKeys.count(key)) {
        throw ValidationError("config file '" + path + "': unknown key '" + key + "'");
      }
    }
    return values;
  }

  // flag > config file > built-in defaults. A layer that picks open_metric
  // without tau resets tau to that metric's default.
  RewardConfig resolve(const std::map<std::string, std::string>& file) const {
    std::map<std::string, std::string> merged;
    for (const auto& [key, value] : file) {
      if (kRewardKeys.count(key)) merged[key] = value;
    }
    if (open_metric) {
      merged["open_metric"] = *open_metric;
      if (!tau) merged.erase("tau");
    }
    if (tau) {
      std::ostringstream v;
      v.precision(17);
      v << *tau;
      merged["tau"] = v.str();
    }
    if (alpha) merged["alpha"] = std::to_string(*alpha);
    if (ems_mode) merged["ems_mode"] = *ems_mode;
    if (length_unit) merged["length_unit"] = *length_unit;
    if (length_enabled) merged["length_enabled"] = *length_enabled;
    return apply_key_values(merged);
  }
};

struct GrpoFlags {
  std::optional<int> group_size;
  std::optional<double> clip_eps;
  std::optional<double> kl_beta;
  std::optional<double> lr;
  std::optional<double> temperature;
  std::optional<double> max_grad_norm;

  void attach(CLI::App* app) {
    app->add_option("--group-size", group_size, "Rollouts per prompt (default 8)");
    app->add_option("--clip-eps", clip_eps, "PPO clipping threshold (default 0.2)");
    app->add_option("--kl-beta", kl_beta, "KL penalty coefficient (default 0.001)");
    app->add_option("--lr", lr, "Learning rate (toy default 0.5)");
    app->add_option("--temperature", temperature, "Sampling temperature (default 1.0)");
    app->add_option("--max-grad-norm", max_grad_norm, "Update clip, <= 0 disables");
  }

  GrpoConfig resolve(const std::map<std::string, std::string>& file) const {
    GrpoConfig config = toylab::toy_grpo_defaults();
    auto number = [&](const char* key) -> std::optional<double> {
      auto it = file.find(key);
      if (it == file.end()) return std::nullopt;
      char* end = nullptr;
      const double v = std::strtod(it->second.c_str(), &end);
      if (it->second.empty() || *end != '\0') {
        throw ValidationError(std::string("config key '") + key + "': not a number");
      }
      return v;
    };
    if (auto v = number("group_size")) config.group_size = static_cast<int>(*v);
    if (auto v = number("clip_eps")) config.clip_epsilon = *v;
    if (auto v = number("kl_beta")) config.kl_beta = *v;
    if (auto v = number("lr")) config.learning_rate = *v;
    if (auto v = number("std_floor")) config.std_floor = *v;
    if (auto v = number("temperature")) config.temperature = *v;
    if (auto v = number("max_grad_norm")) config.max_grad_norm = *v;
    if (group_size) config.group_size = *group_size;
    if (clip_eps) config.clip_epsilon = *clip_eps;
    if (kl_beta) config.kl_beta = *kl_beta;
    if (lr) config.learning_rate = *lr;
    if (temperature) config.temperature = *temperature;
    if (max_grad_norm) config.max_grad_norm = *max_grad_norm;
    config.validate();
    return config;
  }
};

toylab::KindMix parse_mix(const std::string& text) {
  std::vector<double> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') {
      throw ValidationError("--mix: expected three comma-separated numbers, got '" +
                            text + "'");
    }
    parts.push_back(v);
  }
  if (parts.size() != 3) {
    throw ValidationError("--mix: expected mcq,numeric,open proportions");
  }
  toylab::KindMix mix{parts[0], parts[1], parts[2]};
  mix.validate();
  return mix;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Writes to `path`, or stdout when path is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw InputError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish(const std::string& path) {
    stream().flush();
    if (!stream()) throw InputError("error writing '" + (path.empty() ? "<stdout>" : path) + "'");
  }

 private:
  std::ofstream file_;
};

// --- score -----------------------------------------------------------------

struct ScoreCommand {
  RewardFlags reward;
  std::optional<std::string> response;
  std::string response_file;
  std::string kind;
  std::optional<std::string> gold;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<int> target_length;

  void attach(CLI::App* app) {
    auto* text = app->add_option("--response", response, "Raw response text");
    auto* file = app->add_option("--response-file", response_file, "File holding the response");
    text->excludes(file);
    app->add_option("--kind", kind, "Gold kind: option|range|literal|text")->required();
    app->add_option("--gold", gold, "Gold option letter, literal, or reference text");
    app->add_option("--lower", lower, "Range lower bound (inclusive)");
    app->add_option("--upper", upper, "Range upper bound (inclusive)");
    app->add_option("--target-length", target_length, "Target thinking length");
    reward.attach(app);
  }

  int run() {
    const RewardConfig config = reward.resolve(reward.file_values());
    QARecord record;
    record.id = "cli";
    record.target_length = target_length;
    auto need_gold = [&]() -> const std::string& {
      if (!gold) throw ValidationError("field 'gold': required for kind '" + kind + "'");
      return *gold;
    };
    if (kind == "option") {
      if (need_gold().size() != 1) {
        throw ValidationError("field 'gold': expected one option letter");
      }
      record.gold = GoldAnswer::option_label((*gold)[0]);
    } else if (kind == "range") {
      if (!lower || !upper) {
        throw ValidationError("field 'lower'/'upper': both required for kind 'range'");
      }
      record.gold = GoldAnswer::numeric_range(*lower, *upper);
    } else if (kind == "literal") {
      record.gold = GoldAnswer::literal_value(need_gold());
    } else if (kind == "text") {
      record.gold = GoldAnswer::reference_text(need_gold());
    } else {
      throw ValidationError("field 'kind': unknown kind '" + kind +
                            "' (expected option|range|literal|text)");
    }
    record.validate();
    if (!response && response_file.empty()) {
      throw UsageError("one of --response or --response-file is required");
    }
    const std::string text = response ? *response : read_text_file(response_file);
    std::cout << breakdown_to_line(total_reward(text, record, config)) << '\n';
    return 0;
  }
};

// --- batch-score -------------------------------------------------------------

struct BatchScoreCommand {
  RewardFlags reward;
  std::string records_path;
  std::string responses_path;
  std::string out_path;

  void attach(CLI::App* app) {
    app->add_option("--records", records_path, "Record file (JSONL)")->required();
    app->add_option("--responses", responses_path, "Responses file: {id, response} JSONL")
        ->required();
    app->add_option("--out", out_path, "Output file (default stdout)");
    reward.attach(app);
  }

  int run() {
    const RewardConfig config = reward.resolve(reward.file_values());
    const std::vector<QARecord> all_records = load_records(records_path);
    const Predictions responses = load_predictions(responses_path);

    std::map<std::string, const QARecord*> by_id;
    for (const QARecord& r : all_records) by_id[r.id] = &r;

    std::vector<QARecord> matched;
    std::vector<std::string> texts;
    for (const auto& [id, record] : by_id) {
      if (auto it = responses.find(id); it != responses.end()) {
        matched.push_back(*record);
        texts.push_back(it->second);
      }
    }
    const std::vector<RewardBreakdown> scored = score_responses(texts, matched, config);

    std::set<std::string> ids;
    for (const auto& [id, record] : by_id) ids.insert(id);
    for (const auto& [id, text] : responses) ids.insert(id);

    Output out(out_path);
    std::size_t next = 0;
    for (const std::string& id : ids) {
      const bool has_record = by_id.count(id) > 0;
      const bool has_response = responses.count(id) > 0;
      if (has_record && has_response) {
        out.stream() << breakdown_to_line(scored[next++], id) << '\n';
      } else {
        out.stream() << JsonLine()
                            .add("id", id)
                            .add("status", has_record ? "missing_response" : "unknown_id")
                            .str()
                     << '\n';
        std::cerr << "batch-score: " << (has_record ? "no response for id '" : "response for unknown id '")
                  << id << "'\n";
      }
    }
    out.finish(out_path);
    return 0;
  }
};

// --- eval --------------------------------------------------------------------

struct EvalCommand {
  RewardFlags reward;
  std::string records_path;
  std::string predictions_path;
  std::string format = "table";
  std::string report_path;

  void attach(CLI::App* app) {
    app->add_option("--records", records_path, "Record file (JSONL)")->required();
    app->add_option("--predictions", predictions_path, "Predictions: {id, response} JSONL")
        ->required();
    app->add_option("--format", format, "table|jsonl")->check(CLI::IsMember({"table", "jsonl"}));
    app->add_option("--report", report_path, "Also write the JSONL report here");
    reward.attach(app);
  }

  int run() {
    const RewardConfig config = reward.resolve(reward.file_values());
    const std::vector<QARecord> records = load_records(records_path);
    const Predictions predictions = load_predictions(predictions_path);
    const EvalReport report = evaluate(records, predictions, config);
    std::cout << (format == "jsonl" ? report_to_jsonl(report) : report_to_table(report));
    if (!report_path.empty()) {
      Output out(report_path);
      out.stream() << report_to_jsonl(report);
      out.finish(report_path);
    }
    return 0;
  }
};

// --- train-toy ---------------------------------------------------------------

struct TrainToyCommand {
  RewardFlags reward;
  GrpoFlags grpo;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> task_seed;
  long long steps = 5000;
  std::size_t count = 64;
  std::string mix = "1,0,0";
  std::optional<int> target_length;
  std::size_t max_len = 64;
  double template_bias = 4.0;
  std::string trace_path;

  void attach(CLI::App* app) {
    app->add_option("--seed", seed, "Training seed");
    app->add_option("--task-seed", task_seed, "Task generation seed (default: --seed)");
    app->add_option("--steps", steps, "Training steps")->check(CLI::NonNegativeNumber);
    app->add_option("--count", count, "Number of toy tasks")->check(CLI::PositiveNumber);
    app->add_option("--mix", mix, "Kind proportions mcq,numeric,open");
    app->add_option("--target-length", target_length, "Target thinking length (words)");
    app->add_option("--max-len", max_len, "Generation cap in tokens (>= 8)");
    app->add_option("--template-bias", template_bias, "Initial grammar prior logit");
    app->add_option("--trace", trace_path, "Trace file (default stdout)");
    reward.attach(app);
    grpo.attach(app);
  }

  int run() {
    const auto file = reward.file_values();
    const RewardConfig reward_config = reward.resolve(file);
    const GrpoConfig grpo_config = grpo.resolve(file);
    if (max_len < 8) throw ValidationError("--max-len must be at least 8");
    const auto tasks =
        toylab::gen_tasks(task_seed.value_or(seed), count, parse_mix(mix), target_length);
    toylab::TrainOptions options;
    options.steps = steps;
    options.seed = seed;
    options.max_len = max_len;
    options.template_bias = template_bias;
    const toylab::TrainResult result =
        toylab::train(tasks, reward_config, grpo_config, options);

    Output out(trace_path);
    for (const TraceRecord& record : result.trace) {
      out.stream() << to_trace_line(record) << '\n';
    }
    out.finish(trace_path);
    std::cout << toylab::summarize(result.trace, options.trailing_window).to_line() << '\n';
    if (result.rejected_steps > 0) {
      std::cerr << "train-toy: " << result.rejected_steps
                << " steps rejected (non-finite gradient)\n";
    }
    return 0;
  }
};

// --- gen-toy -----------------------------------------------------------------

struct GenToyCommand {
  std::uint64_t seed = 0;
  std::size_t count = 100;
  std::string mix = "0.4,0.3,0.3";
  std::optional<int> target_length;
  std::string out_path;

  void attach(CLI::App* app) {
    app->add_option("--seed", seed, "Generation seed");
    app->add_option("--count", count, "Number of records");
    app->add_option("--mix", mix, "Kind proportions mcq,numeric,open");
    app->add_option("--target-length", target_length, "Target thinking length");
    app->add_option("--out", out_path, "Output record file (default stdout)");
  }

  int run() {
    const auto tasks = toylab::gen_tasks(seed, count, parse_mix(mix), target_length);
    Output out(out_path);
    for (const auto& task : tasks) out.stream() << record_to_line(task.to_record()) << '\n';
    out.finish(out_path);
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verifiable rewards for tagged QA responses, GRPO toy training, evaluation"};
  app.require_subcommand(1);

  ScoreCommand score;
  BatchScoreCommand batch_score;
  EvalCommand eval;
  TrainToyCommand train_toy;
  GenToyCommand gen_toy;
  auto* score_app = app.add_subcommand("score", "Score one response and print its reward breakdown");
  auto* batch_app = app.add_subcommand("batch-score", "Score a responses file against a record file");
  auto* eval_app = app.add_subcommand("eval", "Evaluate a predictions file and print a report");
  auto* train_app = app.add_subcommand("train-toy", "Train the toy policy with GRPO");
  auto* gen_app = app.add_subcommand("gen-toy", "Write synthetic toy records");
  score.attach(score_app);
  batch_score.attach(batch_app);
  eval.attach(eval_app);
  train_toy.attach(train_app);
  gen_toy.attach(gen_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (score_app->parsed()) return score.run();
    if (batch_app->parsed()) return batch_score.run();
    if (eval_app->parsed()) return eval.run();
    if (train_app->parsed()) return train_toy.run();
    if (gen_app->parsed()) return gen_toy.run();
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
