public class Shapes {
    private double scale = 2.0;

    /** Area of a rectangle. */
    double area(double w, double h) {
        // product of the sides
        double a = w * h;
        return a * scale;
    }
}
