#include "rlfc/service.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

#include "rlfc/errors.hpp"
#include "rlfc/image_io.hpp"

namespace rlfc {
namespace {

constexpr const char* kBuiltinIndex = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>RLFC viewer</title></head>
<body style="font-family:sans-serif;background:#222;color:#ddd">
<p id="info">loading</p>
<img id="view" style="image-rendering:pixelated;width:512px;cursor:grab">
<script>
let info, s = 0, t = 0, drag = null;
const img = document.getElementById('view');
function show() {
  img.src = `/api/view?s=${s.toFixed(3)}&t=${t.toFixed(3)}&level=0`;
}
fetch('/api/info').then(r => r.json()).then(j => {
  info = j;
  s = (j.grid.s - 1) / 2; t = (j.grid.t - 1) / 2;
  document.getElementById('info').textContent =
    `${j.grid.s}x${j.grid.t} views, ${j.image.width}x${j.image.height}, h=${j.tree_height}`;
  show();
});
img.onmousedown = e => { drag = [e.clientX, e.clientY, s, t]; e.preventDefault(); };
window.onmouseup = () => { drag = null; };
window.onmousemove = e => {
  if (!drag || !info) return;
  s = Math.min(info.grid.s - 1, Math.max(0, drag[2] - (e.clientX - drag[0]) / 64));
  t = Math.min(info.grid.t - 1, Math.max(0, drag[3] - (e.clientY - drag[1]) / 64));
  show();
};
</script></body></html>
)";

struct BadRequest : std::runtime_error {
  using std::runtime_error::runtime_error;
};

HttpReply json_reply(int status, const nlohmann::json& body) { return {status, "application/json", body.dump()}; }

HttpReply error_reply(int status, const std::string& message) {
  return json_reply(status, {{"error", message}});
}

HttpReply png_reply(const RgbImage& image) {
  const auto bytes = encode_png_rgb(image);
  return {200, "image/png", std::string(bytes.begin(), bytes.end())};
}

const std::string* find(const QueryParams& q, const std::string& key) {
  auto it = q.find(key);
  return it == q.end() ? nullptr : &it->second;
}

double number_param(const QueryParams& q, const std::string& key) {
  const std::string* text = find(q, key);
  if (!text) throw BadRequest("missing parameter '" + key + "'");
  double v = 0.0;
  std::istringstream in(*text);
  in.imbue(std::locale::classic());
  if (!(in >> v) || !in.eof() || !std::isfinite(v)) throw BadRequest("malformed parameter '" + key + "'");
  return v;
}

int int_param(const QueryParams& q, const std::string& key, std::optional<int> fallback, int lo, int hi) {
  const std::string* text = find(q, key);
  if (!text) {
    if (fallback) return *fallback;
    throw BadRequest("missing parameter '" + key + "'");
  }
  int v = 0;
  const char* end = text->data() + text->size();
  auto [ptr, ec] = std::from_chars(text->data(), end, v);
  if (ec != std::errc() || ptr != end || text->empty()) throw BadRequest("malformed parameter '" + key + "'");
  if (v < lo || v > hi) {
    throw BadRequest("parameter '" + key + "' outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return v;
}

template <typename Handler>
HttpReply guarded(Handler&& handler) {
  try {
    return handler();
  } catch (const BadRequest& e) {
    return error_reply(400, e.what());
  } catch (const UsageError& e) {
    return error_reply(400, e.what());
  } catch (const std::exception& e) {
    return error_reply(500, e.what());
  }
}

std::string mime_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

}  // namespace

ViewService::ViewService(DecoderState state, CameraGrid cameras, ServiceConfig config)
    : state_(std::move(state)), cameras_(std::move(cameras)), config_(std::move(config)) {
  const StreamLayout& layout = state_.layout();
  if (cameras_.s_count != layout.s_count || cameras_.t_count != layout.t_count) {
    throw VerificationError("camera grid does not match the stream");
  }
  cameras_.validate();
  cameras_.geometry.validate();
}

CameraPose ViewService::pose_for(double s, double t, int width, int height) const {
  const Eigen::Vector2d p = camera_plane_point(cameras_, s, t);
  const Eigen::Vector3d eye(p.x(), p.y(), cameras_.geometry.camera_plane_z);
  return CameraPose::through_extent(cameras_.geometry, eye, width, height);
}

HttpReply ViewService::info() const {
  const RlfcHeader& h = state_.header();
  const PlaneGeometry& g = cameras_.geometry;
  double x_min = cameras_.column_x(0), x_max = cameras_.column_x(cameras_.s_count - 1);
  double y_min = cameras_.row_y(0), y_max = cameras_.row_y(cameras_.t_count - 1);
  nlohmann::json j = {
      {"grid", {{"s", h.s_count}, {"t", h.t_count}}},
      {"image", {{"width", h.width}, {"height", h.height}}},
      {"tree_height", h.tree_height},
      {"params",
       {{"block_size", h.block_size},
        {"pixel_threshold", h.pixel_threshold},
        {"block_threshold", h.block_threshold},
        {"quant_shift", h.quant_shift},
        {"filter", h.filter.kind == FilterKind::Gaussian ? "gaussian" : "uniform"},
        {"sigma", h.filter.sigma()},
        {"root_codec", h.root_codec == RootCodec::Raw ? "raw" : h.root_codec == RootCodec::Png ? "png" : "jpeg2000"}}},
      {"aperture",
       {{"s", {0, h.s_count - 1}},
        {"t", {0, h.t_count - 1}},
        {"x", {x_min, x_max}},
        {"y", {y_min, y_max}}}},
      {"geometry",
       {{"camera_plane_z", g.camera_plane_z},
        {"image_plane_z", g.image_plane_z},
        {"image_plane_extent",
         {{"x0", g.image_plane_extent.x0},
          {"y0", g.image_plane_extent.y0},
          {"width", g.image_plane_extent.width},
          {"height", g.image_plane_extent.height}}}}},
      {"max_size", config_.max_dimension},
  };
  return json_reply(200, j);
}

HttpReply ViewService::view(const QueryParams& query) const {
  return guarded([&] {
    const StreamLayout& layout = state_.layout();
    const double s = number_param(query, "s");
    const double t = number_param(query, "t");
    if (s < 0.0 || s > layout.s_count - 1 || t < 0.0 || t > layout.t_count - 1) {
      throw BadRequest("camera position outside the aperture");
    }
    const int w = int_param(query, "w", layout.width, 1, config_.max_dimension);
    const int h = int_param(query, "h", layout.height, 1, config_.max_dimension);
    RenderOptions options;
    options.stop_level = int_param(query, "level", 0, 0, layout.tree_height);
    if (find(query, "focus")) {
      const double focus = number_param(query, "focus");
      if (focus <= cameras_.geometry.camera_plane_z) throw BadRequest("focus must lie beyond the camera plane");
      options.image_plane_z = focus;
    }
    return png_reply(render_view(state_, cameras_, pose_for(s, t, w, h), options));
  });
}

HttpReply ViewService::image(const QueryParams& query) const {
  return guarded([&] {
    const StreamLayout& layout = state_.layout();
    const int s = int_param(query, "s", std::nullopt, 0, layout.s_count - 1);
    const int t = int_param(query, "t", std::nullopt, 0, layout.t_count - 1);
    return png_reply(decode_image(state_, {s, t}));
  });
}

HttpReply ViewService::asset(const std::string& path) const {
  std::string rel = path.empty() || path == "/" ? "index.html" : path.substr(path.front() == '/' ? 1 : 0);
  if (!config_.assets_dir) {
    if (rel == "index.html") return {200, "text/html; charset=utf-8", kBuiltinIndex};
    return error_reply(404, "not found");
  }
  const std::filesystem::path p = std::filesystem::path(rel).lexically_normal();
  if (p.is_absolute() || p.empty() || *p.begin() == "..") return error_reply(404, "not found");
  const std::filesystem::path full = *config_.assets_dir / p;
  std::ifstream in(full, std::ios::binary);
  if (!in || std::filesystem::is_directory(full)) return error_reply(404, "not found");
  std::ostringstream body;
  body << in.rdbuf();
  return {200, mime_type(full), body.str()};
}

struct HttpServer::Impl {
  const ViewService& service;
  httplib::Server server;
  bool bound = false;
};

namespace {

QueryParams to_query(const httplib::Request& req) {
  QueryParams q;
  for (const auto& [k, v] : req.params) q.emplace(k, v);
  return q;
}

void send(httplib::Response& res, const HttpReply& reply) {
  res.status = reply.status;
  res.set_content(reply.body, reply.content_type.c_str());
}

}  // namespace

HttpServer::HttpServer(const ViewService& service) : impl_(new Impl{service, {}, false}) {
  auto& srv = impl_->server;
  const ViewService* svc = &service;
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  srv.Get("/api/info", [svc](const httplib::Request&, httplib::Response& res) { send(res, svc->info()); });
  srv.Get("/api/view", [svc](const httplib::Request& req, httplib::Response& res) { send(res, svc->view(to_query(req))); });
  srv.Get("/api/image",
          [svc](const httplib::Request& req, httplib::Response& res) { send(res, svc->image(to_query(req))); });
  srv.Get(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    send(res, error_reply(404, "unknown endpoint"));
  });
  srv.Get(R"(/.*)", [svc](const httplib::Request& req, httplib::Response& res) { send(res, svc->asset(req.path)); });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  impl_->bound = true;
  return bound;
}

void HttpServer::run() {
  if (!impl_->bound) throw Error("server is not bound");
  impl_->server.listen_after_bind();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace rlfc
