// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance gate. Runs each criterion at its stated tolerance and
// time limit, prints one PASS/FAIL line per criterion and exits non-zero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "synthgen/bvh.hpp"
#include "synthgen/camera.hpp"
#include "synthgen/config.hpp"
#include "synthgen/container.hpp"
#include "synthgen/pipeline.hpp"
#include "synthgen/render.hpp"
#include "synthgen/run.hpp"
#include "synthgen/sampler.hpp"
#include "support/test_support.hpp"

namespace sg = synthgen;
namespace st = synthgen::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> run;
};

// ---------------------------------------------------------------------------

Outcome config_conformance() {
  st::TempDir dir;
  st::write_file(dir / "tri.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  // The three documented listings, joined into one document.
  const std::string text = R"({
"setup": {
  "blender_install_path": "/PATH",
  "blender_version": "blender-2.80",
  "pip": [
    "h5py",
    "imageio"
  ]
},
"global": {
  "all": {
    "output_dir": "<args:0>"
  }
},
"modules": [
  {
    "name": "main.Initializer"
  },
  {
    "name": "loader.ObjLoader",
    "config": { "path": "<args:1>" }
  }
]
})";
  const std::vector<std::string> args{(dir / "out").string(), (dir / "tri.obj").string()};
  const auto doc = sg::substitute_args(sg::parse_config(text), args);

  const bool substituted = doc.global_settings.at("all").get<std::string>("output_dir") == args[0] &&
                           doc.modules.at(1).config.get<std::string>("path") == args[1] &&
                           sg::find_placeholders(doc).empty();
  sg::RunOptions options;
  options.dry_run = true;
  const auto report = sg::run_document(doc, options);
  std::vector<std::string> executed;
  for (const auto& t : report.timings)
    if (!t.skipped) executed.push_back(t.name);
  const std::vector<std::string> expected{"main.Initializer", "loader.ObjLoader"};
  const bool setup_kept = doc.setup.blender_version == "blender-2.80" && doc.setup.pip.size() == 2;
  const bool pass = substituted && executed == expected && report.planned == expected && setup_kept;
  return {pass, fmt::format("order=[{}], substitution {}", fmt::join(executed, ", "), substituted ? "ok" : "wrong")};
}

Outcome bvh_oracle() {
  std::mt19937_64 gen(20261018);
  std::size_t mismatches = 0, hits = 0;
  double worst_dt = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const auto scene = st::random_triangle_scene(gen, 1 + gen() % 200);
    const sg::Bvh bvh(scene);
    for (int r = 0; r < 100; ++r) {
      const auto ray = st::random_ray(gen);
      const auto got = bvh.intersect_nearest(ray);
      const auto want = st::brute_force_nearest(scene, ray);
      if (got.has_value() != want.has_value()) {
        ++mismatches;
        continue;
      }
      if (!got) continue;
      ++hits;
      const double dt = std::abs(got->t - static_cast<double>(want->t));
      worst_dt = std::max(worst_dt, dt);
      if (got->mesh_id != want->mesh_id || got->triangle_id != want->triangle_id || !(dt < 1e-9)) ++mismatches;
    }
  }
  return {mismatches == 0, fmt::format("{} mismatches over 1e5 rays ({} hits), max |dt| = {:.3g}", mismatches, hits,
                                       worst_dt)};
}

Outcome furnace() {
  sg::Scene scene;
  sg::Material wall;
  wall.diffuse_albedo = {0.5, 0.5, 0.5};
  wall.emission = {0.2, 0.2, 0.2};
  const auto mat = scene.add_material(wall);
  scene.add_mesh(st::make_closed_box({-1, -1, -1}, {1, 1, 1}, mat));
  scene.add_camera_keyframe({{0, 0, 0}, {0.3, 0.2, 0.1}});
  const sg::Bvh bvh(scene);

  sg::RenderSettings s;
  s.camera.resolution_x = s.camera.resolution_y = 16;
  s.samples = 4096;
  s.max_bounces = 8;
  s.threads = 1;
  const auto frame = sg::render_frame(scene, bvh, scene.keyframes()[0], s, sg::Pass::colors).at(0);
  double sum = 0.0;
  for (float v : frame.f32()) sum += v;
  const double mean = sum / static_cast<double>(frame.f32().size());
  const double rel = std::abs(mean - st::kFurnaceExpected) / st::kFurnaceExpected;
  return {rel < 0.02, fmt::format("mean {:.5f} vs analytic {:.5f} (rel err {:.3f}%)", mean, st::kFurnaceExpected, rel * 100.0)};
}

Outcome pass_invariants() {
  sg::Scene scene;
  const auto wall = scene.add_mesh(st::make_rect_z(-1.5, 1.5, -1.5, 1.5, -5.0, "wall", 1));
  scene.add_mesh(st::make_closed_box({-0.8, -0.5, -3.5}, {-0.3, 0.0, -3.0}, 0, "box"));
  scene.set_category(1, 2);
  sg::TriangleMesh tri;
  tri.vertices = {{0.3, 0.2, -4.0}, {1.0, 0.2, -4.0}, {0.6, 0.9, -4.0}};
  tri.triangles = {{0, 1, 2}};
  tri.object_name = "triangle";
  tri.category_id = 3;
  scene.add_mesh(tri);
  scene.add_camera_keyframe({{0, 0, 0}, {0, 0, 0}});
  const sg::Bvh bvh(scene);
  sg::RenderSettings s;
  s.camera.resolution_x = s.camera.resolution_y = 64;
  const auto& kf = scene.keyframes()[0];
  const auto depth = sg::render_frame(scene, bvh, kf, s, sg::Pass::depth).at(0);
  const auto normals = sg::render_frame(scene, bvh, kf, s, sg::Pass::normals).at(0);
  const auto classes = sg::render_frame(scene, bvh, kf, s, sg::Pass::segmap).at(0);
  s.map_by = sg::MapBy::instance;
  const auto instances = sg::render_frame(scene, bvh, kf, s, sg::Pass::segmap).at(0);

  std::size_t wall_pixels = 0, bad_depth = 0, bad_normal = 0, bad_consistency = 0, misses = 0;
  std::set<std::int32_t> seen_ids;
  for (std::uint32_t y = 0; y < 64; ++y) {
    for (std::uint32_t x = 0; x < 64; ++x) {
      const auto i = depth.index(x, y);
      const float d = depth.f32()[i];
      const auto n = normals.index(x, y);
      const double len = std::sqrt(double(normals.f32()[n]) * normals.f32()[n] + double(normals.f32()[n + 1]) * normals.f32()[n + 1] +
                                   double(normals.f32()[n + 2]) * normals.f32()[n + 2]);
      const bool miss = std::isinf(d);
      misses += miss;
      if ((classes.i32()[i] == 0) != miss || (instances.i32()[i] == 0) != miss) ++bad_consistency;
      if (!miss && std::abs(len - 1.0) > 1e-4) ++bad_normal;
      if (miss && len != 0.0) ++bad_normal;
      if (instances.i32()[i] != 0) seen_ids.insert(instances.i32()[i]);
      if (instances.i32()[i] == wall) {
        ++wall_pixels;
        if (std::abs(d - 5.0) > 1e-6) ++bad_depth;
      }
    }
  }
  std::set<std::int32_t> table_ids, mesh_ids;
  for (const auto& row : instances.instances) table_ids.insert(row.id);
  for (const auto& m : scene.meshes()) mesh_ids.insert(m.instance_id);
  const bool bijective = table_ids.size() == instances.instances.size() && table_ids == mesh_ids &&
                         seen_ids == mesh_ids && instances.instances.size() == scene.meshes().size();
  const bool pass = wall_pixels > 0 && misses > 0 && bad_depth == 0 && bad_normal == 0 && bad_consistency == 0 &&
                    bijective;
  return {pass, fmt::format("wall px {} (bad depth {}), bad normals {}, segmap/depth mismatches {}, ids {} of {}",
                            wall_pixels, bad_depth, bad_normal, bad_consistency, seen_ids.size(), mesh_ids.size())};
}

Outcome sampler_statistics() {
  constexpr int kDraws = 10000;
  std::vector<std::string> failures;

  sg::Rng rng = sg::make_stream(42, 1);
  const sg::BoxSpec box{{0, 0, 0}, {1, 1, 1}};
  std::vector<std::vector<std::size_t>> bins(3, std::vector<std::size_t>(10, 0));
  sg::Vec3 sum;
  for (int i = 0; i < kDraws; ++i) {
    const auto p = sg::sample_uniform_box(box, rng);
    sum = sum + p;
    for (int a = 0; a < 3; ++a) ++bins[a][std::min<std::size_t>(9, static_cast<std::size_t>(p[a] * 10))];
  }
  double worst_box_chi = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double mean = sum[a] / kDraws;
    if (std::abs(mean - 0.5) > 0.02) failures.push_back(fmt::format("box mean[{}]={:.4f}", a, mean));
    worst_box_chi = std::max(worst_box_chi, st::chi_square_uniform(bins[a]));
  }
  if (worst_box_chi >= st::kChiSquare999Df9) failures.push_back(fmt::format("box chi2={:.2f}", worst_box_chi));

  const sg::SphereSpec shell{{0, 0, 1}, 4.0, sg::SphereMode::surface};
  std::vector<std::size_t> octants(8, 0);
  sg::Vec3 dir_sum;
  double worst_radius = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const auto d = sg::sample_sphere(shell, rng) - shell.center;
    worst_radius = std::max(worst_radius, std::abs(sg::length(d) - 4.0));
    dir_sum = dir_sum + d / 4.0;
    ++octants[(d.x > 0) | ((d.y > 0) << 1) | ((d.z > 0) << 2)];
  }
  const double mean_dir = sg::length(dir_sum / kDraws);
  const double octant_chi = st::chi_square_uniform(octants);
  if (worst_radius >= 1e-9) failures.push_back(fmt::format("radius err {:.3g}", worst_radius));
  if (mean_dir >= 0.05) failures.push_back(fmt::format("mean dir {:.4f}", mean_dir));
  if (octant_chi >= st::kChiSquare999Df7) failures.push_back(fmt::format("octant chi2={:.2f}", octant_chi));

  // Uniform by volume: (r / R)^3 is uniform on [0, 1].
  const sg::SphereSpec ball{{1, 2, 3}, 2.0, sg::SphereMode::interior};
  std::vector<std::size_t> shells(10, 0);
  for (int i = 0; i < kDraws; ++i) {
    const double u = std::pow(sg::length(sg::sample_sphere(ball, rng) - ball.center) / 2.0, 3.0);
    ++shells[std::min<std::size_t>(9, static_cast<std::size_t>(u * 10))];
  }
  const double ball_chi = st::chi_square_uniform(shells);
  if (ball_chi >= st::kChiSquare999Df9) failures.push_back(fmt::format("ball chi2={:.2f}", ball_chi));

  return {failures.empty(),
          failures.empty() ? fmt::format("box chi2 {:.2f}, octant chi2 {:.2f}, ball chi2 {:.2f}, radius err {:.2g}",
                                         worst_box_chi, octant_chi, ball_chi, worst_radius)
                           : fmt::format("{}", fmt::join(failures, "; "))};
}

Outcome proximity_filter() {
  sg::ProximitySpec spec;
  spec.min = 1.0;
  spec.avg = sg::AverageRange{1.0, 4.0};
  const sg::CameraIntrinsics intr;
  const sg::CameraKeyframe pose{{0, 0, 0}, {0, 0, 0}, 0};

  auto wall_at = [&](double depth) {
    sg::Scene scene;
    scene.add_mesh(st::make_rect_z(-100, 100, -100, 100, -depth, "wall"));
    return sg::check_proximity(pose, intr, spec, sg::Bvh(scene));
  };
  const bool far_ok = wall_at(2.0);
  const bool near_rejected = !wall_at(0.5);

  // Left half of the view sees a plane at depth 1, the right half one at depth 3.
  sg::Scene two;
  two.add_mesh(st::make_rect_z(-100, 0, -100, 100, -1.0, "near"));
  two.add_mesh(st::make_rect_z(0, 100, -100, 100, -3.0, "far"));
  const auto depths = sg::proximity_distances(pose, intr, sg::Bvh(two), 10);
  double mean = 0.0;
  for (double d : depths) mean += d;
  mean /= static_cast<double>(depths.size());

  // Dense analytic oracle: 100 x 100 cell-centre rays against the two planes.
  double dense = 0.0;
  for (int j = 0; j < 100; ++j)
    for (int i = 0; i < 100; ++i) dense += (i + 0.5) / 100.0 * 2.0 - 1.0 < 0.0 ? 1.0 : 3.0;
  dense /= 10000.0;

  sg::ProximitySpec avg_only;
  avg_only.avg = sg::AverageRange{1.0, 4.0};
  const bool two_ok = sg::check_proximity(pose, intr, avg_only, sg::Bvh(two));
  const bool pass = far_ok && near_rejected && two_ok && depths.size() == 100 && std::abs(mean - dense) < 1e-9;
  return {pass, fmt::format("wall@2 {}, wall@0.5 {}, two-plane mean {:.12f} vs dense {:.12f}",
                            far_ok ? "accepted" : "rejected", near_rejected ? "rejected" : "accepted", mean, dense)};
}

std::string pipeline_config(const std::filesystem::path& obj, const std::filesystem::path& poses, int res, int spp,
                            bool stereo) {
  nlohmann::json doc = {
      {"global", {{"all", {{"output_dir", "<args:0>"}, {"seed", 42}}}}},
      {"modules",
       {{{"name", "main.Initializer"}},
        {{"name", "loader.ObjLoader"}, {"config", {{"path", obj.string()}, {"category_id", 1}}}},
        {{"name", "loader.CameraLoader"},
         {"config", {{"path", poses.string()}, {"resolution_x", res}, {"resolution_y", res}, {"stereo", stereo}}}},
        {{"name", "renderer.RgbRenderer"}, {"config", {{"samples", spp}, {"render_depth", true}}}},
        {{"name", "renderer.NormalRenderer"}},
        {{"name", "renderer.SegMapRenderer"}, {"config", {{"map_by", "instance"}}}},
        {{"name", "writer.ContainerWriter"}}}}};
  return doc.dump(2);
}

void write_cornell(const st::TempDir& dir) {
  const auto text = st::cornell_obj("cornell.mtl");
  st::write_file(dir / "cornell.obj", text.obj);
  st::write_file(dir / "cornell.mtl", text.mtl);
}

Outcome determinism_and_container() {
  st::TempDir dir;
  write_cornell(dir);
  st::write_file(dir / "poses.txt", "0 0 3.5 0 0 0\n0.4 0.1 3.4 0 0.1 0\n-0.4 0.2 3.3 -0.05 -0.1 0\n");
  st::write_file(dir / "run.json", pipeline_config(dir / "cornell.obj", dir / "poses.txt", 24, 8, true));

  sg::RunOptions options;
  options.threads = 0;
  const std::vector<std::string> a{(dir / "a").string()}, b{(dir / "b").string()};
  const auto ra = sg::run_config_file(dir / "run.json", a, options);
  options.threads = 1;  // thread count must not change the output
  const auto rb = sg::run_config_file(dir / "run.json", b, options);

  std::size_t identical = 0, stereo_ok = 0, roundtrip_ok = 0;
  for (std::uint32_t k = 0; k < 3; ++k) {
    const auto pa = sg::container_path(dir / "a", k), pb = sg::container_path(dir / "b", k);
    const auto bytes = st::read_bytes(pa);
    identical += !bytes.empty() && bytes == st::read_bytes(pb);
    const auto file = sg::read_container(pa);
    stereo_ok += file.find("colors_L") && file.find("colors_R") && !file.find("colors") && file.find("depth_L") &&
                 file.find("segmap_mapping_R");
    const auto reencoded = sg::encode_container(file);
    roundtrip_ok += std::string(reinterpret_cast<const char*>(reencoded.data()), reencoded.size()) == bytes;
  }

  // Structure round trip straight from rendered frames.
  sg::Scene scene;
  scene.add_mesh(st::make_rect_z(-1, 1, -1, 1, -2, "plane", 4));
  scene.add_camera_keyframe({{0, 0, 0}, {0, 0, 0}});
  const sg::Bvh bvh(scene);
  sg::RenderSettings s;
  s.camera.resolution_x = 8;
  s.camera.resolution_y = 6;
  s.samples = 2;
  s.map_by = sg::MapBy::instance;
  std::vector<sg::FrameBuffer> frames;
  for (auto pass : {sg::Pass::colors, sg::Pass::depth, sg::Pass::normals, sg::Pass::segmap})
    for (auto& f : sg::render_frame(scene, bvh, scene.keyframes()[0], s, pass)) frames.push_back(std::move(f));
  const auto written = sg::write_container(frames, dir / "rt");
  const bool structure = sg::read_container(written) == sg::container_from_frames(frames);

  const bool counts = ra.containers.size() == 3 && rb.containers.size() == 3 &&
                      st::count_files_with_extension(dir / "a", ".bpc") == 3;
  const bool pass = identical == 3 && stereo_ok == 3 && roundtrip_ok == 3 && structure && counts;
  return {pass, fmt::format("{}/3 byte-identical, {}/3 with L/R keys, {}/3 re-encode equal, structure {}",
                            identical, stereo_ok, roundtrip_ok, structure ? "equal" : "differs")};
}

Outcome throughput() {
  st::TempDir dir;
  write_cornell(dir);
  st::write_file(dir / "poses.txt",
                 "0 0 3.5 0 0 0\n0.3 0 3.5 0 0.08 0\n-0.3 0 3.5 0 -0.08 0\n0 0.3 3.5 -0.08 0 0\n0 -0.3 3.5 0.08 0 0\n");
  st::write_file(dir / "run.json", pipeline_config(dir / "cornell.obj", dir / "poses.txt", 64, 16, false));
  sg::RunOptions options;
  options.threads = 1;
  const std::vector<std::string> args{(dir / "out").string()};
  const auto start = std::chrono::steady_clock::now();
  const auto report = sg::run_config_file(dir / "run.json", args, options);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = report.containers.size() == 5 && report.images == 20 && report.bvh_builds == 1 && seconds < 60.0;
  return {pass, fmt::format("{} containers, {} images, {} BVH build(s), {:.2f} s end-to-end", report.containers.size(),
                            report.images, report.bvh_builds, seconds)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  const std::vector<Criterion> criteria{
      {1, "config conformance", 1.0, config_conformance},
      {2, "BVH vs brute force", 60.0, bvh_oracle},
      {3, "furnace", 300.0, furnace},
      {4, "pass invariants", 30.0, pass_invariants},
      {5, "sampler statistics", 5.0, sampler_statistics},
      {6, "proximity filter", 5.0, proximity_filter},
      {7, "determinism and container", 120.0, determinism_and_container},
      {8, "desk-scale throughput", 60.0, throughput},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome outcome;
    const auto start = std::chrono::steady_clock::now();
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("threw: {}", e.what())};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.limit_seconds;
    const bool pass = outcome.pass && in_time;
    failed += !pass;
    std::printf("%s [%d] %s: %s (%.2f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                outcome.detail.c_str(), seconds, c.limit_seconds, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
