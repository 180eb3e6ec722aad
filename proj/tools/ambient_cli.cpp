#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ambient/clustering.hpp"
#include "ambient/config.hpp"
#include "ambient/eval.hpp"
#include "ambient/io.hpp"
#include "ambient/pipeline.hpp"
#include "ambient/scene.hpp"
#include "ambient/skeleton.hpp"

using namespace ambient;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

ConfigValues load_values(const Globals& g) {
  ConfigValues values;
  if (!g.config_file.empty()) values.merge_file(g.config_file);
  for (const auto& o : g.overrides) values.apply_override(o);
  if (g.seed) values.set("normals.seed", std::to_string(*g.seed));
  return values;
}

PointCloud load_scan(const fs::path& path) {
  auto r = io::read_scan(path);
  if (r.dropped_non_finite > 0) {
    std::cerr << "warning: " << path.string() << ": dropped " << r.dropped_non_finite
              << " non-finite records\n";
  }
  return std::move(r.cloud);
}

struct Prepared {
  RangeImage image;
  GroundMask ground;
  std::size_t points = 0;
};

Prepared prepare(const fs::path& scan, const PipelineConfig& config) {
  const auto cloud = load_scan(scan);
  auto img = project(cloud, config.sensor);
  auto ground = config.ground_enabled ? classify_ground(img, config.ground) : GroundMask(img.rows(), img.cols());
  return {std::move(img), std::move(ground), cloud.size()};
}

// Ground 1, cluster id + 1, everything else 0.
std::vector<std::int32_t> file_labels(const Prepared& p, const ClusterLabeling& l) {
  std::vector<std::int32_t> out(p.image.size(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (p.ground(i)) {
      out[i] = static_cast<std::int32_t>(io::kGroundLabel);
    } else if (l.label(i) > 0) {
      out[i] = static_cast<std::int32_t>(io::cluster_file_label(l.label(i)));
    }
  }
  return out;
}

ClusterLabeling run_method(const std::string& method, const Prepared& p, const PipelineConfig& config,
                           std::optional<double> beta0, double eps) {
  if (method == "depth") return depth_cluster(p.image, p.ground, {beta0.value_or(config.first_pass_beta0())});
  if (method == "euclidean") return euclidean_cluster(p.image, p.ground, config.euclidean);
  if (method == "fixed") return fixed_euclidean_cluster(p.image, p.ground, {eps, config.euclidean.window});
  throw Error(ErrorCode::InvalidInput, "unknown method '" + method + "'");
}

std::vector<fs::path> scans_in(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".bin" || ext == ".pcd")) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Range-image clustering and degeneration-aware point cloud filter"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_file, "INI file with settings")->check(CLI::ExistingFile);
  app.add_option("--set", g.overrides, "override one setting, section.key=value (repeatable)");
  app.add_option("--seed", g.seed, "sampling and scene seed");

  // project
  auto* project_cmd = app.add_subcommand("project", "project a scan and report occupancy");
  std::string project_scan;
  std::string depth_csv;
  project_cmd->add_option("scan", project_scan, ".bin or .pcd scan")->required()->check(CLI::ExistingFile);
  project_cmd->add_option("--depth-csv", depth_csv, "write the depth grid, one row per ring");

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "remove ground and cluster one scan");
  std::string cluster_scan;
  std::string cluster_method = "euclidean";
  std::optional<double> cluster_beta0;
  double cluster_eps = FixedEuclideanParams{}.eps;
  std::string cluster_out;
  cluster_cmd->add_option("scan", cluster_scan)->required()->check(CLI::ExistingFile);
  cluster_cmd->add_option("--method", cluster_method, "depth | euclidean | fixed")
      ->check(CLI::IsMember({"depth", "euclidean", "fixed"}));
  cluster_cmd->add_option("--beta0", cluster_beta0, "depth threshold, degrees");
  cluster_cmd->add_option("--eps", cluster_eps, "fixed radius, meters");
  cluster_cmd->add_option("-o,--out", cluster_out, "labeled PCD");

  // skeleton
  auto* skeleton_cmd = app.add_subcommand("skeleton", "extract skeleton points of one scan");
  std::string skeleton_scan;
  std::string skeleton_out;
  skeleton_cmd->add_option("scan", skeleton_scan)->required()->check(CLI::ExistingFile);
  skeleton_cmd->add_option("-o,--out", skeleton_out, "PCD of skeleton points labeled by Euclidean id + 1");

  // degen
  auto* degen_cmd = app.add_subcommand("degen", "print the degeneration report of each scan");
  std::vector<std::string> degen_scans;
  degen_cmd->add_option("scans", degen_scans)->required()->check(CLI::ExistingFile);

  // filter
  auto* filter_cmd = app.add_subcommand("filter", "run the full pipeline on a scan or a directory");
  std::string filter_in;
  std::string filter_out;
  std::string filter_summary;
  bool include_removed = false;
  filter_cmd->add_option("input", filter_in, "scan file or directory of scans")->required()->check(CLI::ExistingPath);
  filter_cmd->add_option("-o,--out", filter_out, "output PCD, or directory when the input is one")->required();
  filter_cmd->add_option("--summary", filter_summary, "JSON lines per frame (default stdout)");
  filter_cmd->add_flag("--include-removed", include_removed, "also write dropped returns with label 0");

  // eval-iou
  auto* iou_cmd = app.add_subcommand("eval-iou", "cluster-to-box IoU of one scan");
  std::string iou_scan;
  std::string iou_boxes;
  std::string iou_method = "euclidean";
  double iou_pad = 0.0;
  iou_cmd->add_option("scan", iou_scan)->required()->check(CLI::ExistingFile);
  iou_cmd->add_option("--boxes", iou_boxes, "cx cy cz dx dy dz yaw [tag] per line")->required()->check(CLI::ExistingFile);
  iou_cmd->add_option("--method", iou_method, "depth | euclidean | fixed | pipeline")
      ->check(CLI::IsMember({"depth", "euclidean", "fixed", "pipeline"}));
  iou_cmd->add_option("--pad", iou_pad, "grow every box by this much per face, meters");

  // eval-rpe
  auto* rpe_cmd = app.add_subcommand("eval-rpe", "relative pose error between two KITTI pose files");
  std::string rpe_est;
  std::string rpe_gt;
  std::size_t rpe_delta = 1;
  std::string rpe_csv;
  rpe_cmd->add_option("--est", rpe_est)->required()->check(CLI::ExistingFile);
  rpe_cmd->add_option("--gt", rpe_gt)->required()->check(CLI::ExistingFile);
  rpe_cmd->add_option("--delta", rpe_delta, "frame offset")->check(CLI::PositiveNumber);
  rpe_cmd->add_option("--csv", rpe_csv, "per-pair errors");

  // gen-scene
  auto* gen_cmd = app.add_subcommand("gen-scene", "ray-cast a synthetic scene");
  SyntheticSceneSpec spec;
  std::string gen_kind = "corridor";
  std::string gen_out;
  std::string gen_boxes;
  std::string gen_truth;
  bool no_ground = false;
  gen_cmd->add_option("--kind", gen_kind, "corridor | room | wall-pair | clutter")
      ->check(CLI::IsMember({"corridor", "room", "wall-pair", "clutter"}));
  gen_cmd->add_option("-o,--out", gen_out, ".bin, or .pcd labeled by object id")->required();
  gen_cmd->add_option("--boxes", gen_boxes, "write object boxes");
  gen_cmd->add_option("--truth", gen_truth, "PCD labeled by object id (0 = ground)");
  gen_cmd->add_option("--sigma", spec.noise_sigma, "range noise, meters");
  gen_cmd->add_option("--num-boxes", spec.num_boxes);
  gen_cmd->add_option("--corridor-width", spec.corridor_width);
  gen_cmd->add_option("--room-length", spec.room_length);
  gen_cmd->add_option("--room-width", spec.room_width);
  gen_cmd->add_option("--near", spec.near_wall_distance);
  gen_cmd->add_option("--far", spec.far_wall_distance);
  gen_cmd->add_option("--clutter-radius", spec.clutter_radius);
  gen_cmd->add_flag("--no-ground", no_ground);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "per-stage latency of process_frame");
  std::string bench_scan;
  std::string bench_kind = "room";
  int bench_runs = 50;
  bench_cmd->add_option("scan", bench_scan, "scan to time; a synthetic scene when omitted")->check(CLI::ExistingFile);
  bench_cmd->add_option("--kind", bench_kind, "scene kind when no scan is given")
      ->check(CLI::IsMember({"corridor", "room", "wall-pair", "clutter"}));
  bench_cmd->add_option("-n,--runs", bench_runs)->check(CLI::PositiveNumber);

  auto* config_cmd = app.add_subcommand("config", "print the effective configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto values = load_values(g);
    const auto config = values.to_pipeline();

    if (*project_cmd) {
      const auto cloud = load_scan(project_scan);
      const auto img = project(cloud, config.sensor);
      if (!depth_csv.empty()) {
        std::ofstream out(depth_csv);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + depth_csv);
        for (int r = 0; r < img.rows(); ++r) {
          for (int c = 0; c < img.cols(); ++c) out << (c ? "," : "") << img.depth(r, c);
          out << '\n';
        }
      }
      print({{"points", cloud.size()},
             {"rows", img.rows()},
             {"cols", img.cols()},
             {"valid_pixels", img.valid_count()},
             {"unprojected_points", cloud.size() - img.valid_count()}});
    } else if (*cluster_cmd) {
      const auto p = prepare(cluster_scan, config);
      const auto l = run_method(cluster_method, p, config, cluster_beta0, cluster_eps);
      if (!cluster_out.empty()) {
        io::write_labeled_pcd(io::labeled_points(p.image, file_labels(p, l)), cluster_out);
      }
      std::size_t largest = 0;
      for (ClusterLabeling::Label id = 1; id <= l.max_label(); ++id) largest = std::max(largest, l.cluster_size(id));
      print({{"method", cluster_method},
             {"clusters", l.num_clusters()},
             {"largest_cluster", largest},
             {"clustered_points", l.labeled_count()},
             {"ground_points", p.ground.count()},
             {"valid_pixels", p.image.valid_count()}});
    } else if (*skeleton_cmd) {
      const auto p = prepare(skeleton_scan, config);
      const auto e = euclidean_cluster(p.image, p.ground, config.euclidean);
      const auto d = depth_cluster(p.image, p.ground, {config.first_pass_beta0()});
      const auto sk = extract_skeleton(e, d, config.skeleton.n_e, config.skeleton.n_d);
      if (!skeleton_out.empty()) {
        std::vector<std::int32_t> labels(p.image.size(), 0);
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (sk(i)) labels[i] = static_cast<std::int32_t>(io::cluster_file_label(e.label(i)));
        }
        auto pts = io::labeled_points(p.image, labels);
        std::erase_if(pts, [](const io::LabeledPoint& q) { return q.label == 0; });
        io::write_labeled_pcd(pts, skeleton_out);
      }
      print({{"skeleton_points", sk.count()},
             {"euclidean_clusters", e.num_clusters()},
             {"depth_clusters", d.num_clusters()},
             {"valid_pixels", p.image.valid_count()}});
    } else if (*degen_cmd) {
      std::uint64_t frame = 0;
      for (const auto& s : degen_scans) {
        const auto r = process_frame(load_scan(s), config, frame++);
        json j = io::to_json(r.report);
        j["scan"] = s;
        std::cout << j.dump() << '\n';
      }
    } else if (*filter_cmd) {
      std::ofstream summary_file;
      if (!filter_summary.empty()) {
        summary_file.open(filter_summary);
        if (!summary_file) throw Error(ErrorCode::IoError, "cannot write " + filter_summary);
      }
      std::ostream& summary = filter_summary.empty() ? std::cout : summary_file;
      const io::LabeledCloudOptions options{include_removed};
      std::vector<fs::path> inputs;
      std::vector<fs::path> outputs;
      if (fs::is_directory(filter_in)) {
        inputs = scans_in(filter_in);
        fs::create_directories(filter_out);
        for (const auto& in : inputs) outputs.push_back(fs::path(filter_out) / in.stem().concat(".pcd"));
      } else {
        inputs = {filter_in};
        outputs = {filter_out};
      }
      std::size_t failed = 0;
      process_sequence(
          inputs.size(), [&](std::size_t i) { return load_scan(inputs[i]); }, config,
          [&](FrameOutcome&& o) {
            json j;
            if (o.result) {
              try {
                io::write_labeled_cloud(*o.result, outputs[o.index], options);
                j = io::frame_summary(*o.result);
              } catch (const Error& e) {
                o.error = FrameError{e.code(), e.what()};
              }
            }
            if (o.error) {
              ++failed;
              j = {{"error", to_string(o.error->code)}, {"message", o.error->message}};
            }
            j["scan"] = inputs[o.index].string();
            summary << j.dump() << '\n';
          });
      summary.flush();
      if (failed > 0) {
        std::cerr << failed << " of " << inputs.size() << " frames failed\n";
        return 1;
      }
    } else if (*iou_cmd) {
      auto boxes = io::read_boxes(iou_boxes);
      for (auto& b : boxes) b.dimensions.array() += 2.0 * iou_pad;
      IoUSummary s;
      if (iou_method == "pipeline") {
        const auto r = process_frame(load_scan(iou_scan), config);
        s = cluster_box_iou(r.image, r.final_pass, boxes);
      } else {
        const auto p = prepare(iou_scan, config);
        s = cluster_box_iou(p.image, run_method(iou_method, p, config, std::nullopt, FixedEuclideanParams{}.eps),
                            boxes);
      }
      print(io::to_json(s));
    } else if (*rpe_cmd) {
      const auto est = io::read_kitti_poses(rpe_est);
      const auto gt = io::read_kitti_poses(rpe_gt);
      const auto errs = rpe(est, gt, rpe_delta);
      if (!rpe_csv.empty()) io::write_rpe_csv(errs, rpe_csv);
      std::vector<double> t;
      std::vector<double> r;
      for (const auto& e : errs) {
        t.push_back(e.translation);
        r.push_back(e.rotation);
      }
      print({{"pairs", errs.size()},
             {"delta", rpe_delta},
             {"rmse_translation_m", rmse(t)},
             {"rmse_rotation_rad", rmse(r)},
             {"max_translation_m", *std::max_element(t.begin(), t.end())}});
    } else if (*gen_cmd) {
      spec.kind = *parse_scene_kind(gen_kind);
      spec.sensor = config.sensor;
      spec.sensor_height = config.ground.sensor_height;
      spec.ground = !no_ground;
      spec.seed = g.seed.value_or(1);
      const auto scene = generate_scene(spec);
      std::vector<io::LabeledPoint> truth;
      truth.reserve(scene.cloud.size());
      for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
        const auto& q = scene.cloud[i];
        truth.push_back({static_cast<float>(q.x), static_cast<float>(q.y), static_cast<float>(q.z),
                         static_cast<std::uint32_t>(scene.object_ids[i])});
      }
      if (fs::path(gen_out).extension() == ".pcd") {
        io::write_labeled_pcd(truth, gen_out);
      } else {
        io::write_kitti_bin(scene.cloud, gen_out);
      }
      if (!gen_truth.empty()) io::write_labeled_pcd(truth, gen_truth);
      if (!gen_boxes.empty()) io::write_boxes(scene.objects, gen_boxes);
      print({{"kind", gen_kind}, {"points", scene.cloud.size()}, {"objects", scene.objects.size()},
             {"seed", spec.seed}});
    } else if (*bench_cmd) {
      PointCloud cloud;
      if (!bench_scan.empty()) {
        cloud = load_scan(bench_scan);
      } else {
        SyntheticSceneSpec s;
        s.kind = *parse_scene_kind(bench_kind);
        s.sensor = config.sensor;
        s.num_boxes = 8;
        s.noise_sigma = 0.01;
        s.seed = g.seed.value_or(1);
        cloud = generate_scene(s).cloud;
      }
      process_frame(cloud, config);
      std::array<std::vector<double>, kStageCount> samples;
      for (int i = 0; i < bench_runs; ++i) {
        const auto r = process_frame(cloud, config);
        for (std::size_t k = 0; k < kStageCount; ++k) samples[k].push_back(r.timings.ms[k]);
      }
      json stages = json::object();
      for (std::size_t k = 0; k < kStageCount; ++k) {
        stages[std::string(to_string(static_cast<Stage>(k)))] = {{"p50_ms", percentile(samples[k], 0.5)},
                                                                 {"p95_ms", percentile(samples[k], 0.95)}};
      }
      print({{"points", cloud.size()}, {"runs", bench_runs}, {"stages", stages}});
    } else if (*config_cmd) {
      std::cout << values.to_ini();
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
