#include "ambient/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

namespace ambient {

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::Project: return "project";
    case Stage::Ground: return "ground";
    case Stage::DepthFirstPass: return "depth_first_pass";
    case Stage::Euclidean: return "euclidean";
    case Stage::Skeleton: return "skeleton";
    case Stage::NormalField: return "normal_field";
    case Stage::Degree: return "degree";
    case Stage::DepthFinalPass: return "depth_final_pass";
    case Stage::Filter: return "filter";
    case Stage::Total: return "total";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

template <class F>
auto timed(StageTimings& timings, Stage stage, F&& f) {
  const auto start = Clock::now();
  auto value = f();
  timings[stage] = elapsed_ms(start);
  return value;
}

}  // namespace

FrameResult process_frame(const PointCloud& cloud, const PipelineConfig& config,
                          std::uint64_t frame_id) {
  const auto start = Clock::now();
  StageTimings t;

  RangeImage image = timed(t, Stage::Project, [&] { return project(cloud, config.sensor); });
  GroundMask ground = timed(t, Stage::Ground, [&] {
    return config.ground_enabled ? classify_ground(image, config.ground)
                                 : GroundMask(image.rows(), image.cols());
  });
  ClusterLabeling first_pass = timed(t, Stage::DepthFirstPass, [&] {
    return depth_cluster(image, ground, DepthClusterParams{config.first_pass_beta0()});
  });
  ClusterLabeling euclid =
      timed(t, Stage::Euclidean, [&] { return euclidean_cluster(image, ground, config.euclidean); });
  SkeletonMask skeleton = timed(t, Stage::Skeleton, [&] {
    return extract_skeleton(euclid, first_pass, config.skeleton);
  });
  std::vector<NormalFeature> features = timed(t, Stage::NormalField, [&] {
    return extract_normal_field(image, skeleton, config.normals);
  });
  DegenerationReport report = timed(t, Stage::Degree, [&] {
    return analyze_degeneration(features, config.degeneration, frame_id);
  });

  const double final_beta0 = config.force_beta0.value_or(report.beta0_dynamic);
  ClusterLabeling final_raw = timed(t, Stage::DepthFinalPass, [&] {
    return depth_cluster(image, ground, DepthClusterParams{final_beta0});
  });
  ClusterLabeling final_pass = timed(t, Stage::Filter, [&] {
    return filter_small_clusters(final_raw, config.skeleton.n_d);
  });

  FrameResult result{std::move(image),  std::move(ground),   std::move(first_pass),
                     std::move(euclid), std::move(skeleton), std::move(features),
                     report,            std::move(final_pass), final_beta0,
                     {},                {},                   {},
                     0,                 0,                    {}};

  const auto points = result.image.points();
  const auto labels = result.final_pass.labels();
  std::size_t valid = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(result.image.depths()[i] > 0.0)) continue;
    ++valid;
    if (result.ground(i)) {
      result.ground_cloud.push_back(points[i]);
    } else if (labels[i] > 0) {
      result.cleaned_cloud.push_back(points[i]);
      result.cleaned_labels.push_back(labels[i]);
    } else {
      ++result.removed_count;
    }
  }
  result.unprojected_count = cloud.size() - valid;
  t[Stage::Total] = elapsed_ms(start);
  result.timings = t;
  return result;
}

void process_sequence(std::size_t count, const FrameSource& source, const PipelineConfig& config,
                      const FrameSink& sink) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(config.workers, count));
  // Frames more than this far ahead of the next one due at the sink wait.
  const std::size_t max_in_flight = 2 * workers;

  std::mutex mutex;
  std::condition_variable ready;
  std::size_t next_to_start = 0;
  std::size_t next_to_emit = 0;
  std::map<std::size_t, FrameOutcome> pending;

  const auto run_one = [&](std::size_t index) {
    FrameOutcome outcome;
    outcome.index = index;
    try {
      outcome.result.emplace(process_frame(source(index), config, index));
    } catch (const Error& e) {
      outcome.error = FrameError{e.code(), e.what()};
    } catch (const std::exception& e) {
      outcome.error = FrameError{ErrorCode::InvalidInput, e.what()};
    }
    return outcome;
  };

  const auto worker = [&] {
    for (;;) {
      std::size_t index = 0;
      {
        std::unique_lock lock(mutex);
        ready.wait(lock, [&] {
          return next_to_start >= count || next_to_start < next_to_emit + max_in_flight;
        });
        if (next_to_start >= count) return;
        index = next_to_start++;
      }
      FrameOutcome outcome = run_one(index);
      std::unique_lock lock(mutex);
      pending.emplace(index, std::move(outcome));
      while (!pending.empty() && pending.begin()->first == next_to_emit) {
        auto node = pending.extract(pending.begin());
        sink(std::move(node.mapped()));
        ++next_to_emit;
      }
      ready.notify_all();
    }
  };

  if (workers == 1) {
    worker();
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) threads.emplace_back(worker);
  for (auto& th : threads) th.join();
}

std::vector<FrameOutcome> process_sequence(std::span<const PointCloud> frames,
                                           const PipelineConfig& config) {
  std::vector<FrameOutcome> out;
  out.reserve(frames.size());
  process_sequence(
      frames.size(), [&](std::size_t i) { return frames[i]; }, config,
      [&](FrameOutcome&& o) { out.push_back(std::move(o)); });
  return out;
}

}  // namespace ambient
