// rlfc command-line front end.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rlfc/decoder.hpp"
#include "rlfc/encoder.hpp"
#include "rlfc/errors.hpp"
#include "rlfc/image_io.hpp"
#include "rlfc/lightfield.hpp"
#include "rlfc/metrics.hpp"
#include "rlfc/renderer.hpp"
#include "rlfc/service.hpp"

namespace {

using namespace rlfc;

struct ParamFlags {
  int tree_height = 3;
  int block_size = 4;
  int pixel_threshold = 4;
  int block_threshold = 80;
  int quant_shift = 2;
  double sigma = 0.7;
  std::string filter = "gaussian";
  std::string root_codec = "png";

  void attach(CLI::App* cmd) {
    cmd->add_option("--height", tree_height, "tree height h")->capture_default_str();
    cmd->add_option("--block-size", block_size, "block size B (2, 4, 8, 16)")->capture_default_str();
    cmd->add_option("--pixel-threshold", pixel_threshold, "pixel threshold Tp")->capture_default_str();
    cmd->add_option("--block-threshold", block_threshold, "block energy threshold Tb")->capture_default_str();
    cmd->add_option("--quant-shift", quant_shift, "quantization shift s")->capture_default_str();
    cmd->add_option("--sigma", sigma, "Gaussian filter width in grid units")->capture_default_str();
    cmd->add_option("--filter", filter, "gaussian or uniform")->capture_default_str();
    cmd->add_option("--root-codec", root_codec, "raw, png or jpeg2000")->capture_default_str();
  }

  EncodingParams params() const {
    EncodingParams p;
    p.tree_height = tree_height;
    p.block_size = block_size;
    p.pixel_threshold = pixel_threshold;
    p.block_threshold = block_threshold;
    p.quant_shift = quant_shift;
    if (filter == "gaussian") {
      p.filter.kind = FilterKind::Gaussian;
    } else if (filter == "uniform") {
      p.filter.kind = FilterKind::Uniform;
    } else {
      throw UsageError("unknown filter '" + filter + "'");
    }
    if (!(sigma > 0.0) || sigma * 256.0 > 65535.0) throw UsageError("sigma out of range");
    p.filter.sigma_q = static_cast<int>(std::lround(sigma * 256.0));
    if (root_codec == "raw") {
      p.root_codec = RootCodec::Raw;
    } else if (root_codec == "png") {
      p.root_codec = RootCodec::Png;
    } else if (root_codec == "jpeg2000") {
      p.root_codec = RootCodec::Jpeg2000;
    } else {
      throw UsageError("unknown root codec '" + root_codec + "'");
    }
    p.validate();
    return p;
  }
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("malformed " + what + ": '" + text + "'");
  }
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("malformed " + what + ": '" + text + "'");
  }
}

std::pair<int, int> parse_dims(const std::string& text, const std::string& what) {
  const auto parts = split(text, 'x');
  if (parts.size() != 2) throw UsageError(what + " must be AxB");
  const int a = parse_int(parts[0], what);
  const int b = parse_int(parts[1], what);
  if (a < 1 || b < 1) throw UsageError(what + " must be positive");
  return {a, b};
}

DecoderState load_stream(const std::string& path) { return DecoderState::init(read_file(path)); }

CameraGrid cameras_for(const DecoderState& state, const std::string& manifest) {
  if (manifest.empty()) return default_cameras(state.header());
  LightFieldGrid lf = load_manifest(manifest);
  if (lf.s_count() != state.header().s_count || lf.t_count() != state.header().t_count ||
      lf.width != state.header().width || lf.height != state.header().height) {
    throw VerificationError("manifest does not match the stream dimensions");
  }
  return lf.cameras;
}

QualityReport evaluate(const LightFieldGrid& source, const std::vector<std::uint8_t>& stream) {
  const DecoderState state = DecoderState::init(stream);
  const LightFieldGrid decoded = decode_all(state, &source.cameras);
  QualityReport r = psnr_ycocg(source, decoded);
  r.bpp = bpp(stream.size(), source.s_count(), source.t_count(), source.width, source.height);
  return r;
}

int run_encode(const std::string& manifest, const std::string& out, const ParamFlags& flags) {
  const LightFieldGrid lf = load_manifest(manifest);
  const EncodeResult result = compress(lf, flags.params());
  write_file(out, result.stream);
  std::printf("%s: %zu bytes, %.4f bpp, %.2f s\n", out.c_str(), result.report.stream_bytes, result.report.bpp,
              result.report.encode_seconds);
  return 0;
}

int run_decode(const std::string& input, const std::string& out, const std::string& manifest) {
  const DecoderState state = load_stream(input);
  const CameraGrid cameras = cameras_for(state, manifest);
  save_manifest(decode_all(state, &cameras), out);
  return 0;
}

int run_render(const std::string& input, const std::string& pose_text, const std::string& camera_text,
               const std::string& size_text, int level, std::optional<double> focus, const std::string& manifest,
               const std::string& out) {
  const DecoderState state = load_stream(input);
  const CameraGrid cameras = cameras_for(state, manifest);
  int w = state.header().width;
  int h = state.header().height;
  if (!size_text.empty()) std::tie(w, h) = parse_dims(size_text, "--size");

  CameraPose pose;
  if (!camera_text.empty()) {
    const auto parts = split(camera_text, ',');
    if (parts.size() != 2) throw UsageError("--camera must be s,t");
    const double s = parse_double(parts[0], "camera s");
    const double t = parse_double(parts[1], "camera t");
    if (s < 0 || t < 0 || s > cameras.s_count - 1 || t > cameras.t_count - 1) {
      throw UsageError("--camera outside the camera grid");
    }
    const Eigen::Vector2d p = camera_plane_point(cameras, s, t);
    pose = CameraPose::through_extent(cameras.geometry, {p.x(), p.y(), cameras.geometry.camera_plane_z}, w, h);
  } else {
    const auto parts = split(pose_text, ',');
    if (parts.size() != 3 && parts.size() != 6 && parts.size() != 7) {
      throw UsageError("--pose must be x,y,z or x,y,z,dx,dy,dz[,fov_degrees]");
    }
    std::vector<double> v;
    for (const auto& p : parts) v.push_back(parse_double(p, "pose component"));
    const Eigen::Vector3d eye(v[0], v[1], v[2]);
    if (parts.size() == 3) {
      pose = CameraPose::through_extent(cameras.geometry, eye, w, h);
    } else {
      const double fov = parts.size() == 7 ? v[6] : 30.0;
      if (!(fov > 0.0 && fov < 180.0)) throw UsageError("field of view must be in (0, 180) degrees");
      pose = CameraPose::look_at(eye, {v[3], v[4], v[5]}, fov, w, h);
    }
  }
  RenderOptions options;
  options.stop_level = level;
  options.image_plane_z = focus;
  RenderStats stats;
  write_png_rgb(out, render_view(state, cameras, pose, options, &stats));
  std::printf("%s: %dx%d, %zu block decodes, %zu pixels outside the aperture\n", out.c_str(), w, h,
              stats.block_decodes, stats.outside_pixels);
  return 0;
}

int run_stats(const std::string& input, const std::string& against, std::optional<double> min_psnr) {
  const LightFieldGrid source = load_manifest(against);
  QualityReport r = evaluate(source, read_file(input));
  std::cout << r.to_json() << "\n";
  if (min_psnr && !(r.psnr_ycocg >= *min_psnr)) {
    throw VerificationError("psnr_ycocg below " + std::to_string(*min_psnr) + " dB");
  }
  return 0;
}

int run_sweep(const std::string& manifest, const std::string& param, const std::string& values,
              const std::string& out, const ParamFlags& flags) {
  const LightFieldGrid lf = load_manifest(manifest);
  const auto items = split(values, ',');
  if (items.empty()) throw UsageError("--values is empty");
  std::ofstream csv;
  if (!out.empty()) {
    csv.open(out);
    if (!csv) throw IoError("cannot write " + out);
  }
  std::ostream& os = out.empty() ? std::cout : csv;
  std::vector<std::pair<std::string, EncodingParams>> runs;
  for (const auto& item : items) {
    ParamFlags f = flags;
    const int v = parse_int(item, "sweep value");
    if (param == "block_threshold") {
      f.block_threshold = v;
    } else if (param == "block_size") {
      f.block_size = v;
    } else if (param == "tree_height") {
      f.tree_height = v;
    } else if (param == "quant_shift") {
      f.quant_shift = v;
    } else {
      throw UsageError("unknown sweep parameter '" + param + "'");
    }
    runs.emplace_back(item, f.params());
  }
  os << kSweepCsvHeader << "\n";
  for (const auto& [label, params] : runs) {
    const EncodeResult result = compress(lf, params);
    os << sweep_csv_row(label, evaluate(lf, result.stream)) << "\n";
  }
  if (!out.empty() && !csv) throw IoError("cannot write " + out);
  return 0;
}

int run_synth(const std::string& grid_text, const std::string& size_text, std::uint64_t seed, const std::string& out) {
  SyntheticSpec spec;
  std::tie(spec.s_count, spec.t_count) = parse_dims(grid_text, "--grid");
  std::tie(spec.width, spec.height) = parse_dims(size_text, "--size");
  spec.seed = seed;
  save_manifest(synthesize_lightfield(spec), out);
  return 0;
}

int run_serve(const std::string& input, const std::string& host, int port, const std::string& assets,
              const std::string& manifest) {
  DecoderState state = load_stream(input);
  CameraGrid cameras = cameras_for(state, manifest);
  ServiceConfig config;
  if (!assets.empty()) config.assets_dir = assets;
  const ViewService service(std::move(state), std::move(cameras), config);
  HttpServer server(service);
  const int bound = server.bind(host, port);
  std::printf("serving %s on http://%s:%d/\n", input.c_str(), host.c_str(), bound);
  std::fflush(stdout);
  server.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RLFC light-field codec"};
  app.require_subcommand(1);

  ParamFlags encode_flags;
  std::string manifest, input, output;
  auto* encode = app.add_subcommand("encode", "compress a light field described by a manifest");
  encode->add_option("manifest", manifest)->required();
  encode->add_option("-o,--output", output)->required();
  encode_flags.attach(encode);

  std::string geometry_manifest;
  auto* decode = app.add_subcommand("decode", "decode every view to PNGs plus a manifest");
  decode->add_option("stream", input)->required();
  decode->add_option("-o,--output", output, "output directory")->required();
  decode->add_option("--manifest", geometry_manifest, "source manifest supplying camera geometry");

  std::string pose_text, camera_text, size_text;
  int level = 0;
  std::optional<double> focus;
  auto* render = app.add_subcommand("render", "render a novel view");
  render->add_option("stream", input)->required();
  auto* pose_opt = render->add_option("--pose", pose_text, "x,y,z[,dx,dy,dz[,fov]]");
  render->add_option("--camera", camera_text, "fractional camera-plane position s,t")->excludes(pose_opt);
  render->add_option("--size", size_text, "WxH (default: native)");
  render->add_option("--level", level, "progressive stop level")->capture_default_str();
  render->add_option("--focus", focus, "image-plane depth override");
  render->add_option("--manifest", geometry_manifest, "source manifest supplying camera geometry");
  render->add_option("-o,--output", output)->required();

  std::optional<double> min_psnr;
  auto* stats = app.add_subcommand("stats", "quality report of a stream against its source");
  stats->add_option("stream", input)->required();
  stats->add_option("--against", manifest)->required();
  stats->add_option("--min-psnr", min_psnr, "exit 5 when psnr_ycocg falls below this");

  ParamFlags sweep_flags;
  std::string param = "block_threshold", values;
  auto* sweep = app.add_subcommand("sweep", "encode at several values of one parameter");
  sweep->add_option("manifest", manifest)->required();
  sweep->add_option("--param", param)->capture_default_str();
  sweep->add_option("--values", values)->required();
  sweep->add_option("-o,--output", output, "CSV path (default: stdout)");
  sweep_flags.attach(sweep);

  std::string grid_text = "8x8", synth_size = "64x64";
  std::uint64_t seed = 7;
  auto* synth = app.add_subcommand("synth", "write the procedural test light field");
  synth->add_option("--grid", grid_text)->capture_default_str();
  synth->add_option("--size", synth_size)->capture_default_str();
  synth->add_option("--seed", seed)->capture_default_str();
  synth->add_option("-o,--output", output, "output directory")->required();

  std::string host = "127.0.0.1", assets;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "HTTP view-synthesis service");
  serve->add_option("stream", input)->required();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--assets", assets, "directory of static viewer files");
  serve->add_option("--manifest", geometry_manifest, "source manifest supplying camera geometry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  }

  try {
    if (*encode) return run_encode(manifest, output, encode_flags);
    if (*decode) return run_decode(input, output, geometry_manifest);
    if (*render) {
      if (pose_text.empty() && camera_text.empty()) throw UsageError("render needs --pose or --camera");
      return run_render(input, pose_text, camera_text, size_text, level, focus, geometry_manifest, output);
    }
    if (*stats) return run_stats(input, manifest, min_psnr);
    if (*sweep) return run_sweep(manifest, param, values, output, sweep_flags);
    if (*synth) return run_synth(grid_text, synth_size, seed, output);
    if (*serve) return run_serve(input, host, port, assets, geometry_manifest);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
