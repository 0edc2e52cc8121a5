public class SignScan {

    public int scanForSign(double[] xs, double[] ys) {
        int count = 0;
        double x = xs[0];
        double y = ys[0];
        do {
            x = xs[count];
            y = ys[count];
            count = count + 1;
        } while ((x * y > 0.0) && (count < xs.length));
        return count;
    }
}
