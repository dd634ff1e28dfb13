// Copyright 2026 The KIIP Authors
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
#include "kiip/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <json.hpp>
#include <ostream>
#include <set>

#include "../parallel.hpp"
#include "kiip/error.hpp"
#include "kiip/io/file.hpp"
#include "kiip/io/kvox.hpp"
#include "kiip/io/manifest.hpp"
#include "kiip/nn/checkpoint.hpp"

namespace kiip::harness {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

template <typename T>
std::vector<T> one_or_many(const json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

nn::Optimizer parse_optimizer(const std::string& s) {
  if (s == "adam") return nn::Optimizer::kAdam;
  if (s == "sgd") return nn::Optimizer::kSgd;
  throw Error(ErrorCode::kFormatError, "optimizer must be adam or sgd, got '" + s + "'");
}

pipeline::CameraMode parse_camera_mode(const std::string& s) {
  if (s == "tracking") return pipeline::CameraMode::kTracking;
  if (s == "fixed") return pipeline::CameraMode::kFixed;
  throw Error(ErrorCode::kFormatError, "camera_mode must be tracking or fixed, got '" + s + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

struct ScanJob {
  int label = 0;
  int grip = 0;
  bool eval = false;
};

std::string grid_name(const ScanJob& job, const std::vector<std::string>& labels) {
  return std::string(job.eval ? "eval_" : "train_") + labels[static_cast<std::size_t>(job.label)] +
         "_" + std::to_string(job.grip) + ".kvox";
}

}  // namespace

void ExperimentConfig::validate() const {
  if (grips_train.empty()) throw Error(ErrorCode::kInvalidArgument, "grips_train is empty");
  for (int g : grips_train) {
    if (g < 1) throw Error(ErrorCode::kInvalidArgument, "grips_train entries must be >= 1");
  }
  if (networks.empty()) throw Error(ErrorCode::kInvalidArgument, "no network selected");
  if (eval_grips < 1) throw Error(ErrorCode::kInvalidArgument, "eval_grips must be >= 1");
  if (object_set == ObjectSet::kUserMeshes && meshes.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "user_meshes needs a non-empty 'meshes' list");
  }
  if (scan.views < 0 || scan.views > 20) throw Error(ErrorCode::kInvalidArgument, "views must be in 0..20");
  if (scan.frames_per_view < 1) throw Error(ErrorCode::kInvalidArgument, "frames_per_view must be >= 1");
  if (pretrain.per_class < 1) throw Error(ErrorCode::kInvalidArgument, "pretrain per_class must be >= 1");
  noise.validate();
  train.validate();
}

ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::kFormatError, "experiment config must be a JSON object");
    if (j.contains("object_set")) c.object_set = parse_object_set(j["object_set"].get<std::string>());
    if (j.contains("grips_train")) c.grips_train = one_or_many<int>(j["grips_train"]);
    if (j.contains("network")) {
      c.networks.clear();
      for (const std::string& n : one_or_many<std::string>(j["network"])) {
        c.networks.push_back(nn::parse_network_kind(n));
      }
    }
    if (j.contains("noise")) {
      const json& n = j["noise"];
      c.noise.gaussian_sigma = n.value("gaussian_sigma", c.noise.gaussian_sigma);
      c.noise.dropout_prob = n.value("dropout_prob", c.noise.dropout_prob);
      c.noise.outlier_prob = n.value("outlier_prob", c.noise.outlier_prob);
      c.noise.outlier_range = n.value("outlier_range", c.noise.outlier_range);
    }
    c.seed = j.value("seed", c.seed);
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
    c.eval_grips = j.value("eval_grips", c.eval_grips);
    if (j.contains("grasp")) c.grasp = parse_grasp_model(j["grasp"].get<std::string>());
    c.save_grids = j.value("save_grids", c.save_grids);
    if (j.contains("meshes")) {
      for (const json& m : j["meshes"]) {
        c.meshes.push_back({m.at("label").get<std::string>(), resolve(base_dir, m.at("path").get<std::string>())});
      }
    }
    if (j.contains("train")) {
      const json& t = j["train"];
      c.train.learning_rate = t.value("learning_rate", c.train.learning_rate);
      c.train.epochs = t.value("epochs", c.train.epochs);
      c.train.batch_size = t.value("batch_size", c.train.batch_size);
      c.train.weight_init_scale = t.value("weight_init_scale", c.train.weight_init_scale);
      c.train.momentum = t.value("momentum", c.train.momentum);
      c.train.threads = t.value("threads", c.train.threads);
      c.train.cache_frozen_features = t.value("cache_frozen_features", c.train.cache_frozen_features);
      if (t.contains("optimizer")) c.train.optimizer = parse_optimizer(t["optimizer"].get<std::string>());
    }
    if (j.contains("pretrain")) {
      const json& p = j["pretrain"];
      c.pretrain.per_class = p.value("per_class", c.pretrain.per_class);
      c.pretrain.epochs = p.value("epochs", c.pretrain.epochs);
      if (p.contains("model")) c.pretrain.model = resolve(base_dir, p["model"].get<std::string>());
    }
    if (j.contains("scan")) {
      const json& s = j["scan"];
      c.scan.views = s.value("views", c.scan.views);
      c.scan.frames_per_view = s.value("frames_per_view", c.scan.frames_per_view);
      c.scan.threshold = s.value("threshold", c.scan.threshold);
      c.scan.camera_distance = s.value("camera_distance", c.scan.camera_distance);
      c.scan.threads = s.value("threads", c.scan.threads);
      if (s.contains("camera_mode")) c.scan.camera_mode = parse_camera_mode(s["camera_mode"].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("experiment config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormatError) throw;
    throw Error(ErrorCode::kFormatError, std::string("experiment config: ") + e.what());
  }
  return c;
}

std::string format_experiment_config(const ExperimentConfig& c) {
  json j;
  j["object_set"] = std::string(to_string(c.object_set));
  j["grips_train"] = c.grips_train;
  json nets = json::array();
  for (nn::NetworkKind k : c.networks) nets.push_back(std::string(nn::to_string(k)));
  j["network"] = nets;
  j["noise"] = {{"gaussian_sigma", c.noise.gaussian_sigma},
                {"dropout_prob", c.noise.dropout_prob},
                {"outlier_prob", c.noise.outlier_prob},
                {"outlier_range", c.noise.outlier_range}};
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir.string();
  j["eval_grips"] = c.eval_grips;
  j["grasp"] = std::string(to_string(c.grasp));
  j["save_grids"] = c.save_grids;
  json meshes = json::array();
  for (const UserMesh& m : c.meshes) meshes.push_back({{"label", m.label}, {"path", m.path.string()}});
  j["meshes"] = meshes;
  j["train"] = {{"learning_rate", c.train.learning_rate},
                {"epochs", c.train.epochs},
                {"batch_size", c.train.batch_size},
                {"optimizer", c.train.optimizer == nn::Optimizer::kAdam ? "adam" : "sgd"},
                {"weight_init_scale", c.train.weight_init_scale},
                {"momentum", c.train.momentum},
                {"threads", c.train.threads},
                {"cache_frozen_features", c.train.cache_frozen_features}};
  j["pretrain"] = {{"per_class", c.pretrain.per_class}, {"epochs", c.pretrain.epochs}};
  if (!c.pretrain.model.empty()) j["pretrain"]["model"] = c.pretrain.model.string();
  j["scan"] = {{"views", c.scan.views},
               {"frames_per_view", c.scan.frames_per_view},
               {"threshold", c.scan.threshold},
               {"camera_mode", c.scan.camera_mode == pipeline::CameraMode::kTracking ? "tracking" : "fixed"},
               {"camera_distance", c.scan.camera_distance},
               {"threads", c.scan.threads}};
  return j.dump(2) + "\n";
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
  config.validate();
  const ObjectFamily family = config.object_set == ObjectSet::kHousehold ? household_family()
                              : config.object_set == ObjectSet::kLego    ? lego_family()
                                                                         : user_mesh_family(config.meshes);
  const int classes = static_cast<int>(family.labels.size());
  const int max_grips = *std::max_element(config.grips_train.begin(), config.grips_train.end());
  const std::uint64_t scene_root = derive_seed(config.seed, "scene");
  const std::uint64_t noise_root = derive_seed(config.seed, "noise");

  ExperimentResult result;
  result.labels = family.labels;

  std::vector<ScanJob> jobs;
  for (int c = 0; c < classes; ++c) {
    for (int g = 0; g < max_grips; ++g) jobs.push_back({c, g, false});
    for (int e = 0; e < config.eval_grips; ++e) jobs.push_back({c, e, true});
  }

  const pipeline::RobotModel robot = fixture_robot(config.scan.camera_distance);
  const sensor::PinholeCamera camera;
  pipeline::WristSchedule schedule = pipeline::default_schedule();
  schedule.poses.resize(static_cast<std::size_t>(config.scan.views));
  pipeline::KiipConfig kc;
  kc.min_count = config.scan.threshold;
  kc.frames_per_view = config.scan.frames_per_view;
  kc.camera_mode = config.scan.camera_mode;
  kc.threads = 1;

  std::vector<nn::LabeledGrid> grids(jobs.size());
  std::vector<pipeline::VoxelCountGrid> counts(jobs.size());
  std::vector<Mat3> train_rotations(jobs.size(), Mat3::Identity());
  const auto t_scan = Clock::now();
  detail::parallel_for(jobs.size(), config.scan.threads, [&](std::size_t i) {
    const ScanJob& job = jobs[i];
    const std::uint64_t split = derive_seed(scene_root, job.eval ? "eval" : "train");
    const std::uint64_t inst = derive_seed(derive_seed(split, static_cast<std::uint64_t>(job.label)),
                                           static_cast<std::uint64_t>(job.grip));
    Rng grasp_rng(derive_seed(inst, "grasp"));
    // Evaluation objects are re-built; for block assemblies that perturbs
    // block placement.
    Rng variant_rng(derive_seed(inst, "variant"));
    const ObjectShape shape = family.make(job.label, job.eval ? &variant_rng : nullptr);
    const geom::RigidTransform grasp = sample_grasp(grasp_rng, kc.crop, kDefaultGraspOffset, config.grasp,
                                                      shape.resting_faces);
    train_rotations[i] = grasp.rotation();

    pipeline::SceneTemplate scene;
    scene.grasped_object = transformed(shape.merged(), grasp);
    sensor::NoiseModel noise = config.noise;
    noise.rng_seed = derive_seed(derive_seed(derive_seed(noise_root, job.eval ? "eval" : "train"),
                                             static_cast<std::uint64_t>(job.label)),
                                 static_cast<std::uint64_t>(job.grip));
    pipeline::KiipResult r = pipeline::run_kiip(scene, robot, camera, noise, schedule, kc);
    counts[i] = r.counts;
    grids[i].grid = std::move(r.occupancy);
    grids[i].label = job.label;
    grids[i].provenance = grid_name(job, family.labels);
  });
  result.scan_seconds = seconds_since(t_scan);
  if (log) *log << "scanned " << jobs.size() << " grasps in " << fmt("%.1f", result.scan_seconds) << " s\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!jobs[i].eval) result.grasp_octants.push_back(rotation_octant(train_rotations[i]));
  }

  if (config.save_grids) {
    const std::filesystem::path dir = config.output_dir / "grids";
    std::filesystem::create_directories(dir);
    io::DatasetManifest train_m;
    io::DatasetManifest eval_m;
    train_m.labels = eval_m.labels = family.labels;
    train_m.threshold = eval_m.threshold = config.scan.threshold;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const std::string name = grid_name(jobs[i], family.labels);
      io::write_kvox(counts[i], dir / name);
      io::DatasetEntry e{name, jobs[i].label, family.labels[static_cast<std::size_t>(jobs[i].label)], jobs[i].grip};
      (jobs[i].eval ? eval_m : train_m).entries.push_back(std::move(e));
    }
    io::save_dataset_manifest(train_m, dir / "train.json");
    io::save_dataset_manifest(eval_m, dir / "eval.json");
  }

  std::optional<nn::FGModel> fg;
  const bool need_fg = std::any_of(config.networks.begin(), config.networks.end(),
                                   [](nn::NetworkKind k) { return k != nn::NetworkKind::kOLE2E; });
  if (need_fg) {
    const auto t0 = Clock::now();
    if (!config.pretrain.model.empty()) {
      fg = nn::load_checkpoint(config.pretrain.model).fg;
    } else {
      const SyntheticCorpus corpus =
          synthetic_corpus(derive_seed(config.seed, "corpus"), config.pretrain.per_class);
      nn::TrainConfig pc = config.train;
      pc.epochs = config.pretrain.epochs;
      pc.rng_seed = derive_seed(config.seed, "pretrain");
      nn::TrainResult pre = nn::pretrain_fg(corpus.grids, corpus.labels, pc);
      fg = std::move(pre.model.fg);
      if (log) {
        *log << "pretrained feature generator on " << corpus.grids.size() << " grids, train accuracy "
             << fmt("%.2f", pre.report.train_accuracy) << "\n";
      }
      if (config.save_grids) {
        nn::ClassifierModel m = std::move(pre.model);
        m.fg = *fg;
        nn::save_checkpoint(m, config.output_dir / "feature_generator.kiipnn");
      }
    }
    result.pretrain_seconds = seconds_since(t0);
  }

  std::vector<int> grips = config.grips_train;
  std::sort(grips.begin(), grips.end());
  grips.erase(std::unique(grips.begin(), grips.end()), grips.end());
  for (int k : grips) {
    std::vector<nn::LabeledGrid> train_set;
    std::vector<const nn::LabeledGrid*> eval_set;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].eval) {
        eval_set.push_back(&grids[i]);
      } else if (jobs[i].grip < k) {
        train_set.push_back(grids[i]);
      }
    }
    for (nn::NetworkKind kind : config.networks) {
      nn::TrainConfig tc = config.train;
      tc.rng_seed = derive_seed(config.seed, "init");
      nn::TrainResult trained = nn::train(kind, train_set, family.labels, tc, fg ? &*fg : nullptr);
      RunResult run;
      run.network = kind;
      run.grips = k;
      run.report = trained.report;
      int correct = 0;
      for (std::size_t e = 0; e < eval_set.size(); ++e) {
        const nn::Prediction p = nn::predict(trained.model, nn::from_occupancy(eval_set[e]->grid));
        ObjectResult o;
        o.object_id = eval_set[e]->label;
        o.label = family.labels[static_cast<std::size_t>(o.object_id)];
        o.predicted = p.label;
        o.predicted_label = family.labels[static_cast<std::size_t>(p.label)];
        correct += o.predicted == o.object_id;
        run.objects.push_back(std::move(o));
      }
      std::stable_sort(run.objects.begin(), run.objects.end(),
                       [](const ObjectResult& a, const ObjectResult& b) { return a.object_id < b.object_id; });
      run.accuracy = eval_set.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(eval_set.size());
      if (log) {
        *log << nn::to_string(kind) << " grips=" << k << " accuracy " << fmt("%.0f", 100 * run.accuracy)
             << "% train " << fmt("%.1f", run.report.wall_seconds) << " s\n";
      }
      result.runs.push_back(std::move(run));
    }
  }
  return result;
}

std::string format_results_csv(const ExperimentResult& r) {
  std::string out = "network,grips,object_id,label,predicted_id,predicted_label,correct,final_train_loss\n";
  for (const RunResult& run : r.runs) {
    const std::string loss = run.report.loss_curve.empty() ? "" : fmt("%.9g", run.report.loss_curve.back());
    for (const ObjectResult& o : run.objects) {
      out += std::string(nn::to_string(run.network)) + "," + std::to_string(run.grips) + "," +
             std::to_string(o.object_id) + "," + o.label + "," + std::to_string(o.predicted) + "," +
             o.predicted_label + "," + (o.predicted == o.object_id ? "1" : "0") + "," + loss + "\n";
    }
  }
  return out;
}

std::string format_table_csv(const ExperimentResult& r) {
  std::string out = "grips,network";
  const std::size_t n = r.labels.size();
  for (std::size_t i = 0; i < n; ++i) out += ",obj" + std::to_string(i + 1);
  out += ",overall_accuracy_pct,time_s,feature_time_s\n";
  for (const RunResult& run : r.runs) {
    out += std::to_string(run.grips) + "," + std::string(nn::to_string(run.network));
    for (const ObjectResult& o : run.objects) out += "," + std::to_string(o.predicted + 1);
    out += "," + fmt("%.0f", 100.0 * run.accuracy) + "," + fmt("%.3f", run.report.wall_seconds) + "," +
           fmt("%.3f", run.report.feature_seconds) + "\n";
  }
  return out;
}

std::string format_results_text(const ExperimentResult& r) {
  std::string out;
  out += "classes:";
  for (std::size_t i = 0; i < r.labels.size(); ++i) out += " " + std::to_string(i + 1) + "=" + r.labels[i];
  out += "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-7s %-24s %9s %9s\n", "grips", "network", "predicted (obj 1..n)",
                "accuracy", "time (s)");
  out += line;
  for (const RunResult& run : r.runs) {
    std::string preds;
    for (const ObjectResult& o : run.objects) preds += std::to_string(o.predicted + 1) + " ";
    std::snprintf(line, sizeof line, "%-6d %-7s %-24s %8.0f%% %9.2f\n", run.grips,
                  std::string(nn::to_string(run.network)).c_str(), preds.c_str(), 100.0 * run.accuracy,
                  run.report.wall_seconds);
    out += line;
  }
  std::snprintf(line, sizeof line, "\nscan time %.1f s, feature generator %.1f s\n", r.scan_seconds,
                r.pretrain_seconds);
  out += line;
  return out;
}

void write_experiment_outputs(const ExperimentResult& result, const ExperimentConfig& config) {
  std::filesystem::create_directories(config.output_dir);
  io::write_file_atomic(config.output_dir / "results.csv", format_results_csv(result));
  io::write_file_atomic(config.output_dir / "table.csv", format_table_csv(result));
  io::write_file_atomic(config.output_dir / "results.txt", format_results_text(result));
  io::write_file_atomic(config.output_dir / "config.json", format_experiment_config(config));
}

}  // namespace kiip::harness
