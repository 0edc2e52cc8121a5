public class Brackets {

    public double[] bracket(Solver function, double initial, double lower, double upper) {
        double a = initial;
        double b = initial;
        double fa = 0.0;
        double fb = 0.0;
        int numIterations = 0;

        do {
            a = Math.max(a - 1.0, lower);
            b = Math.min(b + 1.0, upper);
            fa = function.value(a);
            fb = function.value(b);
            numIterations = numIterations + 1;
        } while ((fa * fb > 0.0) && (numIterations < 100));

        if (fa * fb >= 0.0) {
            throw new IllegalArgumentException("no bracket found");
        }

        double[] result = new double[2];
        result[0] = a;
        result[1] = b;
        return result;
    }
}
