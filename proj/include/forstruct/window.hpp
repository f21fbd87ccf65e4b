#pragma once

#include <string>

namespace forstruct {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double squared_distance(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

struct BoundingBox {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
};

// Planar observation window: an axis-aligned rectangle or a disc.
class Window {
public:
    enum class Shape { rectangle, disc };

    static Window rectangle(double x0, double x1, double y0, double y1);
    static Window disc(Point center, double radius);

    Shape shape() const { return shape_; }
    double area() const;
    BoundingBox bbox() const;

    // Closed containment: boundary points count as inside.
    bool contains(const Point& p) const;

    // Distance from an interior point to the window boundary (0 on the
    // boundary, negative outside).
    double boundary_distance(const Point& p) const;

    Point disc_center() const { return center_; }
    double disc_radius() const { return radius_; }
    const BoundingBox& rect() const { return rect_; }

    std::string describe() const;

private:
    Window() = default;
    Shape shape_ = Shape::rectangle;
    BoundingBox rect_;
    Point center_;
    double radius_ = 0.0;
};

}  // namespace forstruct
