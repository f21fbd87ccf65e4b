#include "forstruct/window.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "forstruct/common.hpp"

namespace forstruct {

Window Window::rectangle(double x0, double x1, double y0, double y1) {
    if (!(x1 > x0) || !(y1 > y0)) {
        throw InvalidInput("Window::rectangle: degenerate ranges");
    }
    Window w;
    w.shape_ = Shape::rectangle;
    w.rect_ = {x0, x1, y0, y1};
    return w;
}

Window Window::disc(Point center, double radius) {
    if (!(radius > 0.0)) {
        throw InvalidInput("Window::disc: radius must be positive");
    }
    Window w;
    w.shape_ = Shape::disc;
    w.center_ = center;
    w.radius_ = radius;
    w.rect_ = {center.x - radius, center.x + radius, center.y - radius, center.y + radius};
    return w;
}

double Window::area() const {
    if (shape_ == Shape::rectangle) {
        return (rect_.x1 - rect_.x0) * (rect_.y1 - rect_.y0);
    }
    return M_PI * radius_ * radius_;
}

BoundingBox Window::bbox() const { return rect_; }

bool Window::contains(const Point& p) const {
    if (shape_ == Shape::rectangle) {
        return p.x >= rect_.x0 && p.x <= rect_.x1 && p.y >= rect_.y0 && p.y <= rect_.y1;
    }
    return squared_distance(p, center_) <= radius_ * radius_;
}

double Window::boundary_distance(const Point& p) const {
    if (shape_ == Shape::rectangle) {
        const double dx = std::min(p.x - rect_.x0, rect_.x1 - p.x);
        const double dy = std::min(p.y - rect_.y0, rect_.y1 - p.y);
        return std::min(dx, dy);
    }
    return radius_ - std::sqrt(squared_distance(p, center_));
}

std::string Window::describe() const {
    std::ostringstream os;
    if (shape_ == Shape::rectangle) {
        os << "rectangle [" << rect_.x0 << "," << rect_.x1 << "]x[" << rect_.y0 << "," << rect_.y1 << "]";
    } else {
        os << "disc center (" << center_.x << "," << center_.y << ") radius " << radius_;
    }
    return os.str();
}

}  // namespace forstruct
