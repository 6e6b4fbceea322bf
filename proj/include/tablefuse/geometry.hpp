/*
 Copyright 2026 The tablefuse Authors
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Core>

#include "tablefuse/error.hpp"

namespace tablefuse
{

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, 2, 1>;

/// Axis-aligned rectangle in pixel coordinates, stored as (x1, y1, x2, y2).
/// Zero-area boxes are valid; inverted or non-finite corners are rejected.
template <typename Scalar>
class BBox
{
public:
    using Corners = Eigen::Matrix<Scalar, 4, 1>;

    BBox()
        : m_corners(Corners::Zero())
    {
    }

    BBox(Scalar x1, Scalar y1, Scalar x2, Scalar y2)
        : m_corners(x1, y1, x2, y2)
    {
        if (!m_corners.allFinite())
            throw InvalidBox("box has non-finite coordinates");
        if (x1 > x2 || y1 > y2)
            throw InvalidBox("inverted box: x1 > x2 or y1 > y2");
    }

    explicit BBox(const Corners& c)
        : BBox(c[0], c[1], c[2], c[3])
    {
    }

    Scalar x1() const { return m_corners[0]; }
    Scalar y1() const { return m_corners[1]; }
    Scalar x2() const { return m_corners[2]; }
    Scalar y2() const { return m_corners[3]; }
    const Corners& corners() const { return m_corners; }

    Scalar width() const { return x2() - x1(); }
    Scalar height() const { return y2() - y1(); }
    Scalar area() const { return width() * height(); }

    BBox translated(Scalar dx, Scalar dy) const
    {
        return BBox(x1() + dx, y1() + dy, x2() + dx, y2() + dy);
    }

    BBox scaled(Scalar s) const { return BBox(Corners(m_corners * s)); }

    friend bool operator==(const BBox& a, const BBox& b) { return a.m_corners == b.m_corners; }

    friend std::ostream& operator<<(std::ostream& os, const BBox& b)
    {
        return os << '(' << b.x1() << ',' << b.y1() << ',' << b.x2() << ',' << b.y2() << ')';
    }

private:
    Corners m_corners;
};

/// Box expressed as (cx, cy, w, h) fractions of the image size. Components
/// within 1e-9 of the unit interval are clamped into it; anything further out
/// is rejected.
template <typename Scalar>
class NormBox
{
public:
    using Vector = Eigen::Matrix<Scalar, 4, 1>;

    static constexpr Scalar tolerance = Scalar(1e-9);

    NormBox()
        : m_v(Vector::Zero())
    {
    }

    NormBox(Scalar cx, Scalar cy, Scalar w, Scalar h)
        : m_v(cx, cy, w, h)
    {
        if (!m_v.allFinite())
            throw InvalidBox("normalized box has non-finite components");
        if ((m_v.array() < -tolerance).any() || (m_v.array() > Scalar(1) + tolerance).any())
            throw InvalidBox("normalized box component outside [0,1]");
        m_v = m_v.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
    }

    Scalar cx() const { return m_v[0]; }
    Scalar cy() const { return m_v[1]; }
    Scalar w() const { return m_v[2]; }
    Scalar h() const { return m_v[3]; }
    const Vector& vec() const { return m_v; }

    friend bool operator==(const NormBox& a, const NormBox& b) { return a.m_v == b.m_v; }

private:
    Vector m_v;
};

using BBoxd = BBox<double>;
using NormBoxd = NormBox<double>;
using Point2d = Point<double>;

template <typename Scalar>
Point<Scalar> centroid(const BBox<Scalar>& box)
{
    return Point<Scalar>((box.x1() + box.x2()) / Scalar(2), (box.y1() + box.y2()) / Scalar(2));
}

template <typename Scalar>
bool contains(const BBox<Scalar>& box, const Point<Scalar>& p)
{
    return p.x() >= box.x1() && p.x() <= box.x2() && p.y() >= box.y1() && p.y() <= box.y2();
}

/// True when `outer` covers `inner` entirely.
template <typename Scalar>
bool contains(const BBox<Scalar>& outer, const BBox<Scalar>& inner)
{
    return inner.x1() >= outer.x1() && inner.y1() >= outer.y1() && inner.x2() <= outer.x2() &&
           inner.y2() <= outer.y2();
}

/// Closed-interval overlap test; boxes that only touch count as intersecting.
template <typename Scalar>
bool intersects(const BBox<Scalar>& a, const BBox<Scalar>& b)
{
    return a.x1() <= b.x2() && b.x1() <= a.x2() && a.y1() <= b.y2() && b.y1() <= a.y2();
}

template <typename Scalar>
Scalar intersection_area(const BBox<Scalar>& a, const BBox<Scalar>& b)
{
    const Scalar w = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
    const Scalar h = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
    if (w <= Scalar(0) || h <= Scalar(0))
        return Scalar(0);
    return w * h;
}

/// Smallest box enclosing both arguments.
template <typename Scalar>
BBox<Scalar> enclose(const BBox<Scalar>& a, const BBox<Scalar>& b)
{
    return BBox<Scalar>(std::min(a.x1(), b.x1()), std::min(a.y1(), b.y1()),
                        std::max(a.x2(), b.x2()), std::max(a.y2(), b.y2()));
}

/// Clamp every corner of `box` into `bounds`.
template <typename Scalar>
BBox<Scalar> clamp_to(const BBox<Scalar>& box, const BBox<Scalar>& bounds)
{
    auto cx = [&](Scalar v) { return std::clamp(v, bounds.x1(), bounds.x2()); };
    auto cy = [&](Scalar v) { return std::clamp(v, bounds.y1(), bounds.y2()); };
    return BBox<Scalar>(cx(box.x1()), cy(box.y1()), cx(box.x2()), cy(box.y2()));
}

/// Intersection over union. Two zero-area boxes score 0.
template <typename Scalar>
Scalar iou(const BBox<Scalar>& a, const BBox<Scalar>& b)
{
    const Scalar inter = intersection_area(a, b);
    const Scalar uni = a.area() + b.area() - inter;
    if (uni <= Scalar(0))
        return Scalar(0);
    return std::clamp(inter / uni, Scalar(0), Scalar(1));
}

/// Generalized IoU: IoU - |C \ (A u B)| / |C| with C the enclosing box.
/// Throws DegeneratePair when both boxes have zero area.
template <typename Scalar>
Scalar giou(const BBox<Scalar>& a, const BBox<Scalar>& b)
{
    if (a.area() <= Scalar(0) && b.area() <= Scalar(0))
        throw DegeneratePair("generalized IoU undefined for two zero-area boxes");
    const Scalar inter = intersection_area(a, b);
    const Scalar uni = a.area() + b.area() - inter;
    const Scalar hull = enclose(a, b).area();
    const Scalar overlap = uni > Scalar(0) ? inter / uni : Scalar(0);
    // hull >= uni > 0 here
    return overlap - (hull - uni) / hull;
}

/// Corner form of a normalized box on an image of the given size, clamped to
/// the image bounds.
template <typename Scalar>
BBox<Scalar> to_corner(const NormBox<Scalar>& nb, Scalar img_w, Scalar img_h)
{
    if (!(img_w > Scalar(0)) || !(img_h > Scalar(0)))
        throw InvalidArgument("image dimensions must be positive");
    auto cx = [&](Scalar v) { return std::clamp(v, Scalar(0), img_w); };
    auto cy = [&](Scalar v) { return std::clamp(v, Scalar(0), img_h); };
    const Scalar hw = nb.w() / Scalar(2);
    const Scalar hh = nb.h() / Scalar(2);
    return BBox<Scalar>(cx((nb.cx() - hw) * img_w), cy((nb.cy() - hh) * img_h),
                        cx((nb.cx() + hw) * img_w), cy((nb.cy() + hh) * img_h));
}

/// Inverse of to_corner for boxes inside the image.
template <typename Scalar>
NormBox<Scalar> normalize(const BBox<Scalar>& box, Scalar img_w, Scalar img_h)
{
    if (!(img_w > Scalar(0)) || !(img_h > Scalar(0)))
        throw InvalidArgument("image dimensions must be positive");
    const Point<Scalar> c = centroid(box);
    return NormBox<Scalar>(c.x() / img_w, c.y() / img_h, box.width() / img_w,
                           box.height() / img_h);
}

/// Set-prediction box loss: lambda_iou * (1 - GIoU) + lambda_l1 * |a - b|_1,
/// with GIoU taken on the unit-square corner form.
template <typename Scalar>
Scalar l_box(const NormBox<Scalar>& a, const NormBox<Scalar>& b, Scalar lambda_iou,
             Scalar lambda_l1)
{
    if (!(lambda_iou >= Scalar(0)) || !(lambda_l1 >= Scalar(0)))
        throw InvalidArgument("box-loss weights must be non-negative");
    const Scalar giou_loss =
        Scalar(1) - giou(to_corner(a, Scalar(1), Scalar(1)), to_corner(b, Scalar(1), Scalar(1)));
    const Scalar l1 = (a.vec() - b.vec()).template lpNorm<1>();
    return lambda_iou * giou_loss + lambda_l1 * l1;
}

} // namespace tablefuse
