#include "parallax/vpdsl/interpreter.hpp"

#include <chrono>
#include <map>
#include <optional>

#include "parallax/error.hpp"
#include "parallax/geomfit.hpp"
#include "parallax/vpdsl/cells.hpp"
#include "parallax/vpdsl/typecheck.hpp"

namespace parallax::vpdsl {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Raised inside a statement; carries the cause name for the diagnostic.
struct CellFailure {
  std::string cause;
  std::string message;
};

class Interpreter {
 public:
  Interpreter(const DepthScene& scene, const ServiceBundle& services, std::uint64_t seed,
              const InterpretOptions& options)
      : scene_(scene), services_(services), seed_(seed), options_(options) {}

  ProgramValue run(const Assignment& stmt, const CellSpec& cell, std::size_t index) {
    index_ = index;
    switch (cell.id) {
      case CellId::Text2Mask: {
        const std::string prompt = arg_string(stmt, "prompt");
        require(services_.segment != nullptr, "no segmentation service configured");
        const auto start = Clock::now();
        Mask mask = services_.segment->segment(scene_.image, prompt);
        masking_seconds_ += seconds_since(start);
        if (mask.prompt.empty()) mask.prompt = prompt;
        return std::make_shared<const Mask>(std::move(mask));
      }
      case CellId::Mask2Pointcloud: {
        const auto& mask = as<std::shared_ptr<const Mask>>(arg(stmt, "mask"));
        PointCloud raw = mask_to_pointcloud(scene_, *mask);
        CleanResult cleaned = clean_pointcloud(raw, options_.clean_neighbors, options_.clean_sigma);
        return std::make_shared<const PointCloud>(std::move(cleaned.cloud));
      }
      case CellId::Pointcloud2Plane:
        return fit_plane_ransac(cloud_arg(stmt), options_.ransac_threshold, options_.ransac_iterations,
                                statement_seed(seed_, index_))
            .plane;
      case CellId::Pointcloud2Cylinder: {
        std::optional<Eigen::Vector3d> direction;
        if (const ProgramValue* v = find_arg(stmt, "direction"); v && std::holds_alternative<Direction>(*v))
          direction = std::get<Direction>(*v).v;
        return fit_cylinder(cloud_arg(stmt), direction);
      }
      case CellId::Pointcloud2Sphere:
        return fit_sphere(cloud_arg(stmt), statement_seed(seed_, index_));
      case CellId::SkeletonExtraction:
        return body(stmt, BodyKind::Skeleton);
      case CellId::FaceExtraction:
        return body(stmt, BodyKind::Face);
      case CellId::Planar:
        return make_planar_anchor({}, as<Plane>(arg(stmt, "plane")));
      case CellId::Cylindrical:
        return make_cylindrical_anchor({}, as<Cylinder>(arg(stmt, "cylinder")));
      case CellId::Spherical:
        return make_spherical_anchor({}, as<Sphere>(arg(stmt, "sphere")));
    }
    throw CellFailure{"InvalidArgument", "unhandled cell"};
  }

  void bind(const std::string& name, ProgramValue value) { env_.emplace(name, std::move(value)); }
  [[nodiscard]] double masking_seconds() const noexcept { return masking_seconds_; }

 private:
  static void require(bool ok, const std::string& message) {
    if (!ok) throw CellFailure{std::string(to_string(ErrorCode::InvalidArgument)), message};
  }

  template <class T>
  static const T& as(const ProgramValue& value) {
    if (const T* v = std::get_if<T>(&value)) return *v;
    throw CellFailure{"TypeMismatch", "argument has the wrong runtime type"};
  }

  const ProgramValue* find_arg(const Assignment& stmt, std::string_view name) {
    for (const Argument& a : stmt.args) {
      if (!iequals(a.name, name)) continue;
      if (a.value.kind == Value::Kind::Null) {
        scratch_ = NullValue{};
        return &scratch_;
      }
      if (a.value.kind == Value::Kind::String) return nullptr;
      scratch_ = resolve(a.value);
      return &scratch_;
    }
    return nullptr;
  }

  const ProgramValue& arg(const Assignment& stmt, std::string_view name) {
    const ProgramValue* v = find_arg(stmt, name);
    if (!v) throw CellFailure{"InvalidArgument", "missing argument '" + std::string(name) + "'"};
    return *v;
  }

  static std::string arg_string(const Assignment& stmt, std::string_view name) {
    for (const Argument& a : stmt.args)
      if (iequals(a.name, name) && a.value.kind == Value::Kind::String) return a.value.text;
    throw CellFailure{"InvalidArgument", "missing string argument '" + std::string(name) + "'"};
  }

  const PointCloud& cloud_arg(const Assignment& stmt) {
    return *as<std::shared_ptr<const PointCloud>>(arg(stmt, "pointcloud"));
  }

  ProgramValue resolve(const Value& value) const {
    const ProgramValue& base = env_.at(value.text);
    if (!value.attribute) return base;
    const std::string& attr = *value.attribute;
    if (const Plane* plane = std::get_if<Plane>(&base)) {
      if (attr == "extruded") return derive_extruded_plane(*plane);
      if (attr == "primary") return Direction{plane->primary_dir};
    }
    if (const auto* frame = std::get_if<std::shared_ptr<const BodyFrame>>(&base)) {
      if (attr == "frontal") return (*frame)->frontal;
      if (attr == "median") return (*frame)->median;
      if (attr == "cranial") return Direction{(*frame)->cranial};
      if (attr == "anterior") return Direction{(*frame)->anterior};
    }
    throw CellFailure{"UnknownAttribute", "no attribute '" + attr + "' on " + value.text};
  }

  ProgramValue body(const Assignment& stmt, BodyKind kind) {
    const auto& mask = as<std::shared_ptr<const Mask>>(arg(stmt, "mask"));
    require(services_.landmark != nullptr, "no landmark service configured");
    const std::vector<Landmark2D> detected = services_.landmark->detect(scene_.image, *mask, kind);
    if (detected.empty()) fail(ErrorCode::MissingLandmarks, "no landmarks detected inside the mask");
    const LandmarkCast cast = cast_landmarks(scene_, detected);
    return std::make_shared<const BodyFrame>(derive_body_frames(cast.landmarks, kind));
  }

  const DepthScene& scene_;
  const ServiceBundle& services_;
  std::uint64_t seed_;
  InterpretOptions options_;
  std::map<std::string, ProgramValue> env_;
  ProgramValue scratch_ = NullValue{};
  std::size_t index_ = 0;
  double masking_seconds_ = 0.0;
};

}  // namespace

ValueType type_of(const ProgramValue& value) noexcept {
  struct Visitor {
    ValueType operator()(const std::shared_ptr<const Mask>&) const { return ValueType::Mask; }
    ValueType operator()(const std::shared_ptr<const PointCloud>&) const { return ValueType::PointCloud; }
    ValueType operator()(const Plane&) const { return ValueType::Plane; }
    ValueType operator()(const Cylinder&) const { return ValueType::Cylinder; }
    ValueType operator()(const Sphere&) const { return ValueType::Sphere; }
    ValueType operator()(const std::shared_ptr<const BodyFrame>& f) const {
      return f && f->kind == BodyKind::Face ? ValueType::Face : ValueType::Skeleton;
    }
    ValueType operator()(const ParametricAnchor&) const { return ValueType::Anchor; }
    ValueType operator()(const Direction&) const { return ValueType::Direction; }
    ValueType operator()(const NullValue&) const { return ValueType::Null; }
  };
  return std::visit(Visitor{}, value);
}

std::uint64_t statement_seed(std::uint64_t seed, std::size_t index) noexcept {
  // splitmix64 finalizer over (seed, index).
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

InterpretResult interpret_program(const VisualProgram& program, const DepthScene& scene,
                                  const ServiceBundle& services, std::uint64_t seed,
                                  const InterpretOptions& options) {
  InterpretResult result;
  result.provenance.program_text = program.source_text;
  const auto start = Clock::now();

  if (auto diags = typecheck_program(program); !diags.empty()) {
    result.outcome = diags.front();
    result.extraction_seconds = seconds_since(start);
    return result;
  }

  Interpreter interp(scene, services, seed, options);
  std::optional<ProgramValue> last;
  for (std::size_t i = 0; i < program.statements.size(); ++i) {
    const Assignment& stmt = program.statements[i];
    const CellSpec& cell = *find_cell(stmt.cell);
    std::optional<CellFailure> failure;
    try {
      ProgramValue value = interp.run(stmt, cell, i);
      last = value;
      interp.bind(stmt.target, std::move(value));
    } catch (const Error& e) {
      failure = CellFailure{std::string(to_string(e.code())), e.what()};
    } catch (const CellFailure& f) {
      failure = f;
    } catch (const std::exception& e) {
      failure = CellFailure{"InternalError", e.what()};
    }
    if (failure) {
      ProgramDiagnostic d;
      d.kind = DiagnosticKind::RuntimeFailure;
      d.statement = i;
      d.span = stmt.span;
      d.cell = std::string(cell.name);
      d.cause = failure->cause;
      d.message = d.cell + " failed (" + d.cause + "): " + failure->message;
      result.outcome = std::move(d);
      result.masking_seconds = interp.masking_seconds();
      result.extraction_seconds = seconds_since(start) - result.masking_seconds;
      return result;
    }
  }

  result.outcome = std::get<ParametricAnchor>(*last);
  result.masking_seconds = interp.masking_seconds();
  result.extraction_seconds = std::max(0.0, seconds_since(start) - result.masking_seconds);
  return result;
}

}  // namespace parallax::vpdsl
