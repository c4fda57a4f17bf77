// Copyright 2026 The synthgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <benchmark/benchmark.h>

#include "support/test_support.hpp"
#include "synthgen/bvh.hpp"
#include "synthgen/loader.hpp"
#include "synthgen/render.hpp"

namespace sg = synthgen;
namespace st = synthgen::testing;

static void BM_BvhBuild(benchmark::State& state) {
  std::mt19937_64 gen(1);
  const auto scene = st::random_triangle_scene(gen, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sg::Bvh(scene));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scene.triangle_count()));
}
BENCHMARK(BM_BvhBuild)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 17)->Unit(benchmark::kMillisecond);

static void BM_BvhNearestHit(benchmark::State& state) {
  std::mt19937_64 gen(2);
  const auto scene = st::random_triangle_scene(gen, static_cast<std::size_t>(state.range(0)));
  const sg::Bvh bvh(scene);
  std::vector<sg::Ray> rays;
  for (int i = 0; i < 4096; ++i) rays.push_back(st::random_ray(gen));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(bvh.intersect_nearest(rays[i++ & 4095]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BvhNearestHit)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 17);

static void BM_RenderCornell(benchmark::State& state) {
  st::TempDir dir;
  const auto text = st::cornell_obj("cornell.mtl");
  st::write_file(dir / "cornell.mtl", text.mtl);
  sg::Scene scene;
  sg::load_obj(st::write_file(dir / "cornell.obj", text.obj), {}, scene);
  scene.add_light({{0, 0.9, 0}, {2, 2, 2}});
  scene.add_camera_keyframe({{0, 0, 3.5}, {0, 0, 0}});
  const sg::Bvh bvh(scene);
  sg::RenderSettings settings;
  settings.camera.resolution_x = settings.camera.resolution_y = 64;
  settings.samples = static_cast<std::uint32_t>(state.range(0));
  settings.threads = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(sg::render_frame(scene, bvh, scene.keyframes()[0], settings, sg::Pass::colors));
  state.SetItemsProcessed(state.iterations() * 64 * 64 * state.range(0));
}
BENCHMARK(BM_RenderCornell)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_RenderSegmap(benchmark::State& state) {
  std::mt19937_64 gen(3);
  auto scene = st::random_triangle_scene(gen, 1 << 14);
  scene.add_camera_keyframe({{0, 0, 4}, {0, 0, 0}});
  const sg::Bvh bvh(scene);
  sg::RenderSettings settings;
  settings.camera.resolution_x = settings.camera.resolution_y = 128;
  settings.threads = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(sg::render_frame(scene, bvh, scene.keyframes()[0], settings, sg::Pass::segmap));
}
BENCHMARK(BM_RenderSegmap)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
